#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <vector>

#include "soergel/common.hpp"

namespace soergel {

// Exponent vector with trailing zeros trimmed, so x1*x3 and x1*x3*x5^0
// compare equal. Variables are 1-based in text, 0-based in storage.
struct Monomial {
    std::vector<std::uint16_t> e;

    Monomial() = default;
    explicit Monomial(std::vector<std::uint16_t> exps) : e(std::move(exps)) { trim(); }

    static Monomial var(unsigned i, unsigned pow = 1) {
        SOERGEL_REQUIRE(i >= 1, "Monomial::var: variables are 1-based");
        Monomial m;
        if (pow) {
            m.e.assign(i, 0);
            m.e[i - 1] = static_cast<std::uint16_t>(pow);
        }
        return m;
    }

    void trim() {
        while (!e.empty() && e.back() == 0) e.pop_back();
    }

    bool is_one() const { return e.empty(); }

    unsigned total_degree() const {
        unsigned d = 0;
        for (auto x : e) d += x;
        return d;
    }

    std::uint16_t exp(unsigned i) const { return i <= e.size() ? e[i - 1] : 0; }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r;
        r.e.resize(std::max(a.e.size(), b.e.size()), 0);
        for (std::size_t i = 0; i < a.e.size(); ++i) r.e[i] += a.e[i];
        for (std::size_t i = 0; i < b.e.size(); ++i) {
            SOERGEL_REQUIRE(r.e[i] + b.e[i] <= 0xffff, "Monomial: exponent overflow");
            r.e[i] = static_cast<std::uint16_t>(r.e[i] + b.e[i]);
        }
        return r;
    }

    // true iff a | b, quotient written to q
    static bool try_divide(const Monomial& b, const Monomial& a, Monomial& q) {
        if (a.e.size() > b.e.size()) return false;
        q.e = b.e;
        for (std::size_t i = 0; i < a.e.size(); ++i) {
            if (q.e[i] < a.e[i]) return false;
            q.e[i] = static_cast<std::uint16_t>(q.e[i] - a.e[i]);
        }
        q.trim();
        return true;
    }

    // graded lex: higher total degree first, then lex on exponents
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
        unsigned da = a.total_degree(), db = b.total_degree();
        if (da != db) return da < db ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.e <=> b.e;
    }
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }

    std::size_t hash() const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto x : e) hash_mix(h, x);
        return h;
    }
};

} // namespace soergel
