#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "soergel/common.hpp"

#include <cstdint>

namespace soergel {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Prime field element; p is carried per value so a whole computation can be
// retargeted at runtime without templating every container on the modulus.
struct Fp {
    std::int64_t v = 0;
    std::int64_t p = 0; // 0 means "unset", only valid for additive identity

    Fp() = default;
    Fp(std::int64_t value, std::int64_t prime) : v(value), p(prime) {
        SOERGEL_REQUIRE(prime >= 2, "Fp: modulus must be >= 2, got ", prime);
        v %= p;
        if (v < 0) v += p;
    }

    static std::int64_t join(std::int64_t a, std::int64_t b, const char* op) {
        if (a == 0) return b;
        if (b == 0) return a;
        SOERGEL_REQUIRE(a == b, "Fp: modulus mismatch in ", op, ": ", a, " vs ", b);
        return a;
    }

    friend Fp operator+(Fp a, Fp b) {
        std::int64_t p = join(a.p, b.p, "+");
        if (p == 0) return Fp{};
        return Fp(a.v + b.v, p);
    }
    friend Fp operator-(Fp a, Fp b) {
        std::int64_t p = join(a.p, b.p, "-");
        if (p == 0) return Fp{};
        return Fp(a.v - b.v, p);
    }
    friend Fp operator*(Fp a, Fp b) {
        std::int64_t p = join(a.p, b.p, "*");
        if (p == 0) return Fp{};
        return Fp((__int128)a.v * b.v % p, p);
    }
    Fp operator-() const { return p == 0 ? Fp{} : Fp(-v, p); }
    friend bool operator==(Fp a, Fp b) {
        if (a.v == 0 && b.v == 0) return true;
        return a.p == b.p && a.v == b.v;
    }
    friend bool operator!=(Fp a, Fp b) { return !(a == b); }

    Fp inverse() const {
        SOERGEL_REQUIRE(v != 0, "Fp: inverse of zero");
        // extended Euclid
        std::int64_t t = 0, nt = 1, r = p, nr = v;
        while (nr != 0) {
            std::int64_t q = r / nr;
            std::swap(t -= q * nt, nt);
            std::swap(r -= q * nr, nr);
        }
        SOERGEL_REQUIRE(r == 1, "Fp: ", v, " not invertible mod ", p);
        if (t < 0) t += p;
        return Fp(t, p);
    }
    friend Fp operator/(Fp a, Fp b) { return a * b.inverse(); }
};

inline std::ostream& operator<<(std::ostream& os, const Fp& a) { return os << a.v; }

// Uniform scalar interface for the coefficient rings used throughout:
// Int (integral computations), Rat (generic characteristic 0), Fp.
template <class K> struct RingTraits;

template <> struct RingTraits<Int> {
    static Int zero() { return Int(0); }
    static Int one() { return Int(1); }
    static Int from_int(std::int64_t n) { return Int(n); }
    static bool is_zero(const Int& a) { return a == 0; }
    static bool invertible(const Int& a) { return a == 1 || a == -1; }
    static Int inverse(const Int& a) {
        SOERGEL_REQUIRE(invertible(a), "Int: not invertible: ", a);
        return a;
    }
    // exact division, errors if it does not divide
    static Int div(const Int& a, const Int& b) {
        SOERGEL_REQUIRE(b != 0, "Int: division by zero");
        Int q = a / b;
        SOERGEL_REQUIRE(q * b == a, "Int: inexact division ", a, " / ", b);
        return q;
    }
    static bool divides(const Int& b, const Int& a) { return b != 0 && a % b == 0; }
    static std::size_t hash(const Int& a) { return std::hash<std::string>{}(a.str()); }
    static bool is_neg(const Int& a) { return a < 0; }
    static std::string str(const Int& a) { return a.str(); }
    static constexpr std::int64_t characteristic = 0;
    static constexpr bool is_field = false;
};

template <> struct RingTraits<Rat> {
    static Rat zero() { return Rat(0); }
    static Rat one() { return Rat(1); }
    static Rat from_int(std::int64_t n) { return Rat(n); }
    static bool is_zero(const Rat& a) { return a == 0; }
    static bool invertible(const Rat& a) { return a != 0; }
    static Rat inverse(const Rat& a) {
        SOERGEL_REQUIRE(a != 0, "Rat: inverse of zero");
        return Rat(1) / a;
    }
    static Rat div(const Rat& a, const Rat& b) {
        SOERGEL_REQUIRE(b != 0, "Rat: division by zero");
        return a / b;
    }
    static bool divides(const Rat& b, const Rat& a) { (void)a; return b != 0; }
    static std::size_t hash(const Rat& a) {
        std::size_t h = std::hash<std::string>{}(numerator(a).str());
        hash_mix(h, std::hash<std::string>{}(denominator(a).str()));
        return h;
    }
    static bool is_neg(const Rat& a) { return a < 0; }
    static std::string str(const Rat& a) {
        if (denominator(a) == 1) return numerator(a).str();
        return numerator(a).str() + "/" + denominator(a).str();
    }
    static constexpr std::int64_t characteristic = 0;
    static constexpr bool is_field = true;
};

template <> struct RingTraits<Fp> {
    static Fp zero() { return Fp{}; }
    static bool is_zero(const Fp& a) { return a.v == 0; }
    static bool invertible(const Fp& a) { return a.v != 0; }
    static Fp inverse(const Fp& a) { return a.inverse(); }
    static Fp div(const Fp& a, const Fp& b) { return a / b; }
    static bool divides(const Fp& b, const Fp& a) { (void)a; return b.v != 0; }
    static std::size_t hash(const Fp& a) {
        std::size_t h = std::hash<std::int64_t>{}(a.v);
        hash_mix(h, std::hash<std::int64_t>{}(a.v == 0 ? 0 : a.p));
        return h;
    }
    static bool is_neg(const Fp&) { return false; }
    static std::string str(const Fp& a) { return std::to_string(a.v); }
    static constexpr std::int64_t characteristic = -1; // determined at runtime
    static constexpr bool is_field = true;
};

// Runtime ring descriptor. Generic code that must materialize literals
// (identity matrices, parsed constants) takes one of these; for Fp it pins
// the modulus chosen on the command line.
template <class K> struct RingCtx {
    K zero() const { return RingTraits<K>::zero(); }
    K one() const { return RingTraits<K>::from_int(1); }
    K from_int(std::int64_t n) const { return RingTraits<K>::from_int(n); }
    std::int64_t characteristic() const { return 0; }
};

template <> struct RingCtx<Fp> {
    std::int64_t p = 0;
    RingCtx() = default;
    explicit RingCtx(std::int64_t prime) : p(prime) {
        SOERGEL_REQUIRE(prime >= 2, "RingCtx<Fp>: modulus must be >= 2, got ", prime);
    }
    Fp zero() const { return Fp{}; }
    Fp one() const { return from_int(1); }
    Fp from_int(std::int64_t n) const {
        SOERGEL_REQUIRE(p >= 2, "RingCtx<Fp>: modulus not set");
        return Fp(n % p, p);
    }
    std::int64_t characteristic() const { return p; }
};

inline Int factorial(unsigned n) {
    Int r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

inline Int binomial(const Int& n, unsigned k) {
    Int num = 1, den = 1;
    for (unsigned i = 0; i < k; ++i) {
        num *= n - i;
        den *= i + 1;
    }
    return RingTraits<Int>::div(num, den);
}

} // namespace soergel
