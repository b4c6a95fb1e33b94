#pragma once

#include <map>
#include <string>
#include <vector>

#include "soergel/common.hpp"
#include "soergel/coxeter.hpp"
#include "soergel/scalar.hpp"

namespace soergel {

// Laurent polynomial in one variable v with integer coefficients.
// Zero coefficients are never stored.
class Laurent {
    std::map<int, Int> c_;

public:
    Laurent() = default;
    explicit Laurent(Int constant) {
        if (constant != 0) c_[0] = std::move(constant);
    }
    static Laurent monomial(int exp, Int coeff = Int(1)) {
        Laurent r;
        if (coeff != 0) r.c_[exp] = std::move(coeff);
        return r;
    }

    void add_term(int exp, const Int& coeff) {
        if (coeff == 0) return;
        auto it = c_.find(exp);
        if (it == c_.end()) {
            c_.emplace(exp, coeff);
        } else {
            it->second += coeff;
            if (it->second == 0) c_.erase(it);
        }
    }

    Int coeff(int exp) const {
        auto it = c_.find(exp);
        return it == c_.end() ? Int(0) : it->second;
    }
    bool is_zero() const { return c_.empty(); }
    int min_exp() const {
        SOERGEL_REQUIRE(!c_.empty(), "min_exp of zero Laurent polynomial");
        return c_.begin()->first;
    }
    int max_exp() const {
        SOERGEL_REQUIRE(!c_.empty(), "max_exp of zero Laurent polynomial");
        return c_.rbegin()->first;
    }
    const std::map<int, Int>& terms() const { return c_; }

    friend Laurent operator+(const Laurent& a, const Laurent& b) {
        Laurent r = a;
        for (const auto& [e, c] : b.c_) r.add_term(e, c);
        return r;
    }
    friend Laurent operator-(const Laurent& a, const Laurent& b) {
        Laurent r = a;
        for (const auto& [e, c] : b.c_) r.add_term(e, -c);
        return r;
    }
    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        Laurent r;
        for (const auto& [ea, ca] : a.c_)
            for (const auto& [eb, cb] : b.c_) r.add_term(ea + eb, ca * cb);
        return r;
    }
    friend bool operator==(const Laurent& a, const Laurent& b) { return a.c_ == b.c_; }

    std::string str() const {
        if (c_.empty()) return "0";
        std::string s;
        for (const auto& [e, c] : c_) {
            if (!s.empty()) s += c < 0 ? " - " : " + ";
            else if (c < 0) s += "-";
            Int a = c < 0 ? Int(-c) : c;
            std::string mono = e == 0 ? "" : e == 1 ? "v" : "v^" + std::to_string(e);
            if (mono.empty()) s += a.str();
            else {
                if (a != 1) s += a.str() + "*";
                s += mono;
            }
        }
        return s;
    }
};

// Hecke algebra of a simply-laced Coxeter graph in the standard basis
// {T_w}, with b_s = T_s + v T_e and quadratic relation
// T_w T_s = T_{ws} when l(ws) > l(w), else (v^-1 - v) T_w + T_{ws}.
// Group elements are keyed by their matrix action on the root lattice,
// which is faithful for every Coxeter group; the ascent test l(ws) > l(w)
// reads off the sign of w(alpha_s).
class Hecke {
public:
    using Key = std::vector<int>;  // rank x rank, row-major: w(alpha_j) in column j

    struct Elt {
        std::map<Key, Laurent> t;

        friend bool operator==(const Elt& a, const Elt& b) { return a.t == b.t; }
    };

    explicit Hecke(CoxeterGraph g) : g_(std::move(g)), r_(g_.rank()) {
        SOERGEL_REQUIRE(r_ > 0, "Hecke algebra needs at least one generator");
    }

    const CoxeterGraph& graph() const { return g_; }

    Key identity_key() const {
        Key k(r_ * r_, 0);
        for (unsigned i = 0; i < r_; ++i) k[i * r_ + i] = 1;
        return k;
    }

    Elt one() const {
        Elt h;
        h.t[identity_key()] = Laurent(Int(1));
        return h;
    }

    // w(alpha_s) is a positive root exactly when right multiplication by s
    // raises length. Geometric-representation roots have all coordinates of
    // one sign, which the assertion double-checks.
    bool right_ascent(const Key& k, Gen s) const {
        bool any_pos = false, any_neg = false;
        for (unsigned i = 0; i < r_; ++i) {
            int v = k[i * r_ + s];
            if (v > 0) any_pos = true;
            if (v < 0) any_neg = true;
        }
        SOERGEL_REQUIRE(any_pos != any_neg, "column of a root-lattice matrix is not a root");
        return any_pos;
    }

    // Matrix of ws: column j becomes col_j - a_{sj} col_s with Cartan entries
    // a_{ss} = 2, a_{s,adjacent} = -1, a_{s,distant} = 0.
    Key right_mul(const Key& k, Gen s) const {
        SOERGEL_REQUIRE(s < r_, "generator out of range");
        Key out = k;
        for (unsigned j = 0; j < r_; ++j) {
            int a = j == s ? 2 : (g_.adjacent(static_cast<Gen>(j), s) ? -1 : 0);
            if (a == 0) continue;
            for (unsigned i = 0; i < r_; ++i) out[i * r_ + j] -= a * k[i * r_ + s];
        }
        return out;
    }

    // h * b_s. Per T_w term: ascent contributes T_{ws} + v T_w, descent
    // contributes T_{ws} + v^-1 T_w.
    Elt mul_bs(const Elt& h, Gen s) const {
        Elt out;
        for (const auto& [k, c] : h.t) {
            Key ks = right_mul(k, s);
            int diag = right_ascent(k, s) ? 1 : -1;
            add_into(out, ks, c);
            add_into(out, k, c * Laurent::monomial(diag));
        }
        return out;
    }

    // b_{w_1} b_{w_2} ... b_{w_d}
    Elt bs_product(const Word& w) const {
        Elt h = one();
        for (Gen s : w) h = mul_bs(h, s);
        return h;
    }

    // Coefficient of T_e.
    Laurent counit(const Elt& h) const {
        auto it = h.t.find(identity_key());
        return it == h.t.end() ? Laurent() : it->second;
    }

    // Graded rank of Hom(BS(x), BS(y)) as a free right module over the
    // polynomial ring: every generator is self-biadjoint via degree-zero
    // cups and caps, so the rank is the T_e coefficient of b over the
    // concatenation reverse(x) . y.
    Laurent hom_rank(const Word& x, const Word& y) const {
        Word z(x.rbegin(), x.rend());
        z.insert(z.end(), y.begin(), y.end());
        return counit(bs_product(z));
    }

private:
    static void add_into(Elt& h, const Key& k, const Laurent& c) {
        if (c.is_zero()) return;
        Laurent& slot = h.t[k];
        slot = slot + c;
        if (slot.is_zero()) h.t.erase(k);
    }

    CoxeterGraph g_;
    unsigned r_;
};

// Dimension of the degree-m piece of the polynomial ring on nvars variables,
// with every variable in degree 2: the number of monomials of polynomial
// degree m/2.
inline Int graded_ring_dim(unsigned nvars, int m) {
    if (m < 0 || m % 2 != 0) return Int(0);
    if (nvars == 0) return Int(m == 0 ? 1 : 0);
    return binomial(Int(m / 2 + nvars - 1), nvars - 1);
}

// Predicted dimension of the degree-d piece of a hom space of graded rank
// `grank` over the polynomial ring on nvars variables: the convolution of
// the rank with the Hilbert series of the ring.
inline Int hom_dim_predicted(const Laurent& grank, unsigned nvars, int d) {
    Int total = 0;
    for (const auto& [j, c] : grank.terms()) total += c * graded_ring_dim(nvars, d - j);
    return total;
}

}  // namespace soergel
