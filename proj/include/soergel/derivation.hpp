#pragma once

#include <vector>

#include "soergel/poly.hpp"

namespace soergel {

// Degree +2 derivation of R determined by its values on the variables.
// Variables with no stored image are annihilated, so an empty image list is
// the zero derivation. The standard differential d(x_i) = x_i^2 is detected
// at construction; its divided powers have the closed per-variable form
// d^(k)(x^l) = C(l+k-1, k) x^(l+k), which keeps them integral over Int.
template <class K>
class RingDerivation {
  public:
    RingDerivation() = default;
    RingDerivation(std::vector<Poly<K>> images, RingCtx<K> ctx)
        : images_(std::move(images)), ctx_(ctx) {
        standard_ = !images_.empty();
        for (std::size_t i = 0; i < images_.size(); ++i) {
            Poly<K> sq = Poly<K>(Monomial::var(static_cast<unsigned>(i + 1), 2), ctx_.one());
            if (images_[i] != sq) standard_ = false;
        }
    }

    const std::vector<Poly<K>>& images() const { return images_; }
    bool is_zero() const { return images_.empty(); }
    bool is_standard() const { return standard_; }

    Poly<K> operator()(const Poly<K>& f) const { return derive(f); }

    Poly<K> derive(const Poly<K>& f) const {
        Poly<K> out;
        for (const auto& [m, c] : f.terms()) {
            for (std::size_t i = 0; i < m.e.size() && i < images_.size(); ++i) {
                if (m.e[i] == 0 || images_[i].is_zero()) continue;
                Monomial rest = m;
                rest.e[i] -= 1;
                rest.trim();
                K coef = c * ctx_.from_int(m.e[i]);
                out += images_[i].scaled(coef) * Poly<K>(rest, ctx_.one());
            }
        }
        return out;
    }

    Poly<K> derive_iter(const Poly<K>& f, unsigned k) const {
        Poly<K> g = f;
        for (unsigned i = 0; i < k; ++i) g = derive(g);
        return g;
    }

    // d^(k) = d^k / k!, exact; errors carry k and the witness monomial
    Poly<K> divided_power(unsigned k, const Poly<K>& f) const {
        if (k == 0) return f;
        if (standard_) {
            Poly<K> out;
            for (const auto& [m, c] : f.terms()) out += divided_power_monomial(k, m, c);
            return out;
        }
        Poly<K> g = derive_iter(f, k);
        return divide_by_factorial(g, k);
    }

    Poly<K> divide_by_factorial(const Poly<K>& g, unsigned k) const {
        Int kf = factorial(k);
        Poly<K> out;
        if constexpr (std::is_same_v<K, Int>) {
            for (const auto& [m, c] : g.terms()) {
                SOERGEL_REQUIRE(c % kf == 0, "divided power not integral: k=", k,
                                ", monomial coefficient ", c.str(), "*", Poly<K>(m, Int(1)).str(),
                                " not divisible by ", kf.str());
                out.add_term(m, c / kf);
            }
        } else {
            K inv = RingTraits<K>::inverse(factorial_in(kf));
            out = g.scaled(inv);
        }
        return out;
    }

  private:
    std::vector<Poly<K>> images_;
    RingCtx<K> ctx_;
    bool standard_ = false;

    K factorial_in(const Int& kf) const {
        if constexpr (std::is_same_v<K, Fp>) {
            Int r = kf % Int(ctx_.characteristic());
            SOERGEL_REQUIRE(r != 0, "divided power: factorial vanishes mod ", ctx_.characteristic());
            return ctx_.from_int(r.convert_to<std::int64_t>());
        } else {
            return K(kf);
        }
    }

    // sum over k_1+...+k_n = k of prod C(e_i + k_i - 1, k_i) x_i^(e_i + k_i),
    // where k_i > 0 forces e_i > 0
    Poly<K> divided_power_monomial(unsigned k, const Monomial& m, const K& c) const {
        std::vector<unsigned> support;
        for (std::size_t i = 0; i < m.e.size(); ++i)
            if (m.e[i] > 0) support.push_back(static_cast<unsigned>(i));
        Poly<K> out;
        std::vector<std::uint16_t> exps(m.e);
        std::function<void(std::size_t, unsigned, Int)> rec = [&](std::size_t idx, unsigned left, Int coef) {
            if (idx == support.size()) {
                if (left == 0) {
                    Monomial mm(exps);
                    out.add_term(mm, c * int_to_k(coef));
                }
                return;
            }
            unsigned i = support[idx];
            for (unsigned ki = 0; ki <= left; ++ki) {
                exps[i] = static_cast<std::uint16_t>(m.e[i] + ki);
                Int f = binomial(Int(m.e[i]) + ki - 1, ki);
                rec(idx + 1, left - ki, coef * f);
            }
            exps[i] = m.e[i];
        };
        rec(0, k, Int(1));
        return out;
    }

    K int_to_k(const Int& n) const {
        if constexpr (std::is_same_v<K, Int>) {
            return n;
        } else if constexpr (std::is_same_v<K, Rat>) {
            return Rat(n);
        } else {
            Int r = n % Int(ctx_.characteristic());
            return ctx_.from_int(r.convert_to<std::int64_t>());
        }
    }
};

} // namespace soergel
