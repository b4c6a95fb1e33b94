#pragma once

#include <map>

#include "soergel/poly.hpp"

namespace soergel {

// Element of Frac(R) kept as num / prod(factor^mult). Factors are canonically
// scaled (monic over a field, primitive with positive leading coefficient
// over Int) and cancellation against num runs to fixpoint after every
// operation. Sequential exact division makes to_poly complete: whenever the
// value lies in R, peeling factors one at a time always succeeds. Equality is
// cross-multiplication, so reducible factors from solver pivots stay sound.
template <class K>
class RatFunc {
  public:
    using Factors = std::map<Poly<K>, unsigned>;

    RatFunc() = default;
    explicit RatFunc(Poly<K> p) : num_(std::move(p)) {}

    static RatFunc fraction(Poly<K> num, const Poly<K>& den) {
        RatFunc r(std::move(num));
        r.divide_poly(den);
        return r;
    }

    const Poly<K>& num() const { return num_; }
    const Factors& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_poly() const { return den_.empty(); }

    Poly<K> to_poly() const {
        RatFunc r = *this;
        r.reduce();
        SOERGEL_REQUIRE(r.den_.empty(), "RatFunc: not a polynomial: ", r.str());
        return r.num_;
    }

    Poly<K> den_poly() const {
        Poly<K> d = unit_one();
        for (const auto& [f, m] : den_)
            for (unsigned i = 0; i < m; ++i) d *= f;
        return d;
    }

    void mul_poly(const Poly<K>& p) {
        num_ *= p;
        reduce();
    }
    void divide_poly(const Poly<K>& f) {
        SOERGEL_REQUIRE(!f.is_zero(), "RatFunc: division by zero");
        if (num_.is_zero()) return;
        if (f.is_constant()) {
            scale_by_inverse_unit(f.constant_term());
            return;
        }
        auto [canon, unit] = normalize_factor(f);
        den_[canon] += 1;
        scale_by_inverse_unit(unit);
        reduce();
    }

    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        RatFunc r;
        r.num_ = a.num_ * b.num_;
        if (r.num_.is_zero()) return r;
        r.den_ = a.den_;
        for (const auto& [f, m] : b.den_) r.den_[f] += m;
        r.reduce();
        return r;
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        if (a.num_.is_zero()) return b;
        if (b.num_.is_zero()) return a;
        RatFunc r;
        r.den_ = a.den_;
        for (const auto& [f, m] : b.den_) {
            auto it = r.den_.find(f);
            unsigned have = it == r.den_.end() ? 0 : it->second;
            if (m > have) r.den_[f] = m;
        }
        Poly<K> na = a.num_, nb = b.num_;
        for (const auto& [f, m] : r.den_) {
            unsigned ma = m - a.mult_of(f), mb = m - b.mult_of(f);
            for (unsigned i = 0; i < ma; ++i) na *= f;
            for (unsigned i = 0; i < mb; ++i) nb *= f;
        }
        r.num_ = na + nb;
        r.reduce();
        return r;
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    RatFunc operator-() const {
        RatFunc r = *this;
        r.num_ = -r.num_;
        return r;
    }

    RatFunc inverse() const {
        SOERGEL_REQUIRE(!num_.is_zero(), "RatFunc: inverse of zero");
        RatFunc r(den_poly());
        r.divide_poly(num_);
        return r;
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inverse(); }

    RatFunc scaled(const K& c) const {
        RatFunc r;
        r.num_ = num_.scaled(c);
        if (!r.num_.is_zero()) r.den_ = den_;
        return r;
    }

    // substitution extends to fractions; factor images must stay nonzero
    RatFunc substitute(const std::vector<Poly<K>>& images, const K& one) const {
        RatFunc r(num_.substitute(images, one));
        for (const auto& [f, m] : den_) {
            Poly<K> fi = f.substitute(images, one);
            for (unsigned i = 0; i < m; ++i) r.divide_poly(fi);
        }
        return r;
    }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        if (a.num_.is_zero() || b.num_.is_zero()) return a.num_.is_zero() == b.num_.is_zero();
        if (a.den_ == b.den_) return a.num_ == b.num_;
        return a.num_ * b.den_poly() == b.num_ * a.den_poly();
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    std::string str() const {
        if (den_.empty()) return num_.str();
        std::string s = "(" + num_.str() + ") / (";
        bool first = true;
        for (const auto& [f, m] : den_) {
            if (!first) s += " * ";
            first = false;
            s += "(" + f.str() + ")";
            if (m > 1) s += "^" + std::to_string(m);
        }
        return s + ")";
    }

  private:
    Poly<K> num_;
    Factors den_;

    unsigned mult_of(const Poly<K>& f) const {
        auto it = den_.find(f);
        return it == den_.end() ? 0 : it->second;
    }

    Poly<K> unit_one() const {
        // reconstructs 1 from any stored coefficient; dens are only built via
        // divide_poly so a factor with a unit leading coefficient exists
        if (!den_.empty()) {
            const K& lc = den_.begin()->first.terms().begin()->second;
            return Poly<K>(RingTraits<K>::div(lc, lc));
        }
        SOERGEL_REQUIRE(!num_.is_zero(), "RatFunc: cannot synthesize 1 from empty value");
        const K& c = num_.terms().begin()->second;
        return Poly<K>(RingTraits<K>::div(c, c));
    }

    void scale_by_inverse_unit(const K& u) {
        SOERGEL_REQUIRE(RingTraits<K>::invertible(u),
                        "RatFunc: denominator unit not invertible: ", RingTraits<K>::str(u));
        num_ = num_.scaled(RingTraits<K>::inverse(u));
    }

    // returns (canonical scaling of f, unit u) with f = u * canonical
    static std::pair<Poly<K>, K> normalize_factor(const Poly<K>& f) {
        K lead = f.terms().begin()->second;
        K unit;
        if constexpr (std::is_same_v<K, Int>) {
            Int g = 0;
            for (const auto& [m, c] : f.terms()) g = boost::multiprecision::gcd(g, boost::multiprecision::abs(c));
            unit = lead < 0 ? -g : g;
        } else {
            unit = lead;
        }
        SOERGEL_REQUIRE(RingTraits<K>::invertible(unit),
                        "RatFunc: factor with non-invertible content: ", f.str());
        Poly<K> canon = f.scaled(RingTraits<K>::inverse(unit));
        return {std::move(canon), std::move(unit)};
    }

    void reduce() {
        if (num_.is_zero()) {
            den_.clear();
            return;
        }
        for (auto it = den_.begin(); it != den_.end();) {
            bool erased = false;
            while (it->second > 0) {
                auto dr = divide(num_, it->first);
                if (!dr.exact) break;
                num_ = std::move(dr.quot);
                if (--it->second == 0) {
                    it = den_.erase(it);
                    erased = true;
                    break;
                }
            }
            if (!erased) ++it;
        }
    }
};

template <class K>
std::ostream& operator<<(std::ostream& os, const RatFunc<K>& r) { return os << r.str(); }

} // namespace soergel
