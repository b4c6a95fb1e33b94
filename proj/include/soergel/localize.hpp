#pragma once

#include <algorithm>
#include <bit>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <soergel/derive.hpp>
#include <soergel/diagram.hpp>
#include <soergel/hecke.hpp>
#include <soergel/ratfunc.hpp>
#include <soergel/realization.hpp>

// Localization of Bott-Samelson objects. Each strand slot contributes a
// mixed-radix digit (2 for a thin strand, 6 for a thick one); a component is a
// digit tuple with slot 0 as the high digit, and carries the group element
// obtained by multiplying the chosen subwords left to right. Morphisms become
// matrices over the fraction field whose nonzero entries may only connect
// components with equal group elements, and integrality of an element is
// decided by peeling slots from the right against the per-slot basis.

namespace soergel {

template <class K> class LocObject;
template <class K> class LocMatrix;
template <class K> class Localization;

namespace detail {

template <class K>
struct LocSlot {
    Strand strand{};
    unsigned radix = 2;
    std::vector<Word> letters;
    std::vector<Poly<K>> factors;
    std::vector<unsigned> factor_degrees;
};

template <class K>
struct LocObjectData {
    std::shared_ptr<const Realization<K>> r;
    ObjWord word;
    std::vector<LocSlot<K>> slots;
    std::vector<unsigned> strides;
    unsigned comps = 1;
    int shift = 0;
    mutable std::vector<std::vector<Poly<K>>> image_cache;
    mutable std::vector<char> image_built;

    std::vector<unsigned> digits(unsigned e) const {
        SOERGEL_REQUIRE(e < comps, "component ", e, " out of range (", comps, ")");
        std::vector<unsigned> d(slots.size());
        for (std::size_t k = 0; k < slots.size(); ++k) {
            d[k] = e / strides[k];
            e %= strides[k];
        }
        return d;
    }

    unsigned index(const std::vector<unsigned>& d) const {
        SOERGEL_REQUIRE(d.size() == slots.size(), "digit tuple has wrong length");
        unsigned e = 0;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            SOERGEL_REQUIRE(d[k] < slots[k].radix, "digit ", d[k], " exceeds slot radix");
            e += d[k] * strides[k];
        }
        return e;
    }

    std::vector<Poly<K>> var_images() const {
        std::vector<Poly<K>> img;
        img.reserve(r->nvars());
        for (unsigned i = 1; i <= r->nvars(); ++i) img.push_back(r->var(i));
        return img;
    }

    void apply_letter(const Word& L, std::vector<Poly<K>>& img) const {
        if (L.empty()) return;
        std::vector<Poly<K>> next;
        next.reserve(img.size());
        for (unsigned i = 1; i <= r->nvars(); ++i)
            next.push_back(r->act_group(L, r->var(i)).substitute(img, r->ctx().one()));
        img = std::move(next);
    }

    const std::vector<Poly<K>>& pi_images(unsigned e) const {
        SOERGEL_REQUIRE(e < comps, "component ", e, " out of range (", comps, ")");
        if (image_built[e]) return image_cache[e];
        std::vector<Poly<K>> img = var_images();
        auto d = digits(e);
        for (std::size_t k = 0; k < slots.size(); ++k) apply_letter(slots[k].letters[d[k]], img);
        image_cache[e] = std::move(img);
        image_built[e] = 1;
        return image_cache[e];
    }
};

// Gauss-Jordan inverse over the rational function field; n stays tiny
template <class K>
std::vector<std::vector<RatFunc<K>>> rf_inverse(std::vector<std::vector<RatFunc<K>>> a,
                                                const RatFunc<K>& one) {
    const std::size_t n = a.size();
    std::vector<std::vector<RatFunc<K>>> inv(n, std::vector<RatFunc<K>>(n));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = one;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col].is_zero()) ++piv;
        SOERGEL_REQUIRE(piv < n, "slot basis matrix is singular");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        RatFunc<K> d = a[col][col].inverse();
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] = a[col][j] * d;
            inv[col][j] = inv[col][j] * d;
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col].is_zero()) continue;
            RatFunc<K> f = a[row][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[row][j] = a[row][j] - f * a[col][j];
                inv[row][j] = inv[row][j] - f * inv[col][j];
            }
        }
    }
    return inv;
}

inline void monomials_rec(unsigned d, unsigned nvars, unsigned i, std::vector<std::uint16_t>& cur,
                          std::vector<Monomial>& out) {
    if (i + 1 == nvars) {
        cur[i] = static_cast<std::uint16_t>(d);
        out.push_back(Monomial(cur));
        cur[i] = 0;
        return;
    }
    for (int e = static_cast<int>(d); e >= 0; --e) {
        cur[i] = static_cast<std::uint16_t>(e);
        monomials_rec(d - unsigned(e), nvars, i + 1, cur, out);
    }
    cur[i] = 0;
}

inline std::vector<Monomial> monomials_of_degree(unsigned d, unsigned nvars) {
    std::vector<Monomial> out;
    if (nvars == 0) {
        if (d == 0) out.push_back(Monomial{});
        return out;
    }
    std::vector<std::uint16_t> cur(nvars, 0);
    monomials_rec(d, nvars, 0, cur, out);
    return out;
}

// sparse row reduction to reduced echelon form; kernel vectors are indexed by
// the free columns in increasing order, which fixes the basis deterministically
template <class F>
std::vector<std::map<unsigned, F>> kernel_basis(std::vector<std::map<unsigned, F>> rows,
                                                unsigned n, const F& one) {
    std::map<unsigned, std::map<unsigned, F>> piv;
    for (auto& row : rows) {
        while (!row.empty()) {
            unsigned c = row.begin()->first;
            auto it = piv.find(c);
            if (it == piv.end()) break;
            F coef = row.begin()->second;
            for (const auto& [col, v] : it->second) {
                auto cell = row.find(col);
                if (cell == row.end()) {
                    F nv = -(coef * v);
                    if (!RingTraits<F>::is_zero(nv)) row.emplace(col, nv);
                } else {
                    cell->second = cell->second - coef * v;
                    if (RingTraits<F>::is_zero(cell->second)) row.erase(cell);
                }
            }
        }
        if (row.empty()) continue;
        unsigned c = row.begin()->first;
        F inv = RingTraits<F>::inverse(row.begin()->second);
        for (auto& [col, v] : row) v = v * inv;
        piv.emplace(c, std::move(row));
    }
    for (auto it = piv.rbegin(); it != piv.rend(); ++it) {
        unsigned c = it->first;
        for (auto jt = piv.begin(); jt != piv.end() && jt->first < c; ++jt) {
            auto f = jt->second.find(c);
            if (f == jt->second.end()) continue;
            F coef = f->second;
            for (const auto& [col, v] : it->second) {
                auto cell = jt->second.find(col);
                if (cell == jt->second.end()) {
                    F nv = -(coef * v);
                    if (!RingTraits<F>::is_zero(nv)) jt->second.emplace(col, nv);
                } else {
                    cell->second = cell->second - coef * v;
                    if (RingTraits<F>::is_zero(cell->second)) jt->second.erase(cell);
                }
            }
        }
    }
    std::vector<std::map<unsigned, F>> out;
    for (unsigned f = 0; f < n; ++f) {
        if (piv.count(f)) continue;
        std::map<unsigned, F> v;
        v.emplace(f, one);
        for (const auto& [c, row] : piv) {
            auto g = row.find(f);
            if (g != row.end() && !RingTraits<F>::is_zero(g->second)) v.emplace(c, -g->second);
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline std::map<unsigned, Int> primitive_int_vector(const std::map<unsigned, Rat>& v) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    Int L = 1;
    for (const auto& [u, q] : v) L = boost::multiprecision::lcm(L, Int(denominator(q)));
    std::map<unsigned, Int> w;
    Int G = 0;
    for (const auto& [u, q] : v) {
        Int val = Int(numerator(q)) * (L / Int(denominator(q)));
        w.emplace(u, val);
        G = boost::multiprecision::gcd(G, val);
    }
    if (G != 0 && G != 1)
        for (auto& [u, val] : w) val /= G;
    if (!w.empty() && w.begin()->second < 0)
        for (auto& [u, val] : w) val = -val;
    return w;
}

inline std::string word_key(const Word& w) {
    std::string s;
    for (Gen g : w) {
        s += std::to_string(unsigned(g));
        s += ',';
    }
    return s;
}

} // namespace detail

template <class K>
class LocObject {
  public:
    LocObject() = default;

    const ObjWord& word() const { return d_->word; }
    unsigned slots() const { return unsigned(d_->slots.size()); }
    unsigned components() const { return d_->comps; }
    unsigned radix(unsigned slot) const { return d_->slots.at(slot).radix; }
    int degree_shift() const { return d_->shift; }
    std::vector<unsigned> digits(unsigned comp) const { return d_->digits(comp); }
    unsigned index(const std::vector<unsigned>& digits) const { return d_->index(digits); }

    // product of the chosen subwords of the first prefix_slots slots
    Word pi_word(unsigned comp, unsigned prefix_slots) const {
        SOERGEL_REQUIRE(prefix_slots <= slots(), "prefix ", prefix_slots, " exceeds slot count");
        auto d = d_->digits(comp);
        Word out;
        for (unsigned k = 0; k < prefix_slots; ++k) {
            const Word& L = d_->slots[k].letters[d[k]];
            out.insert(out.end(), L.begin(), L.end());
        }
        return out;
    }

    // action of the component's full group element on the variables
    const std::vector<Poly<K>>& pi_images(unsigned comp) const { return d_->pi_images(comp); }

    friend bool operator==(const LocObject& a, const LocObject& b) {
        return a.d_->word == b.d_->word;
    }
    friend bool operator!=(const LocObject& a, const LocObject& b) { return !(a == b); }

  private:
    friend class Localization<K>;
    friend class LocMatrix<K>;
    explicit LocObject(std::shared_ptr<detail::LocObjectData<K>> d) : d_(std::move(d)) {}
    std::shared_ptr<detail::LocObjectData<K>> d_;
};

template <class K>
class LocMatrix {
  public:
    using Entries = std::map<std::pair<unsigned, unsigned>, RatFunc<K>>;

    LocMatrix() = default;
    LocMatrix(LocObject<K> src, LocObject<K> tgt) : src_(std::move(src)), tgt_(std::move(tgt)) {}

    const LocObject<K>& src() const { return src_; }
    const LocObject<K>& tgt() const { return tgt_; }

    void set_entry(unsigned t, unsigned s, RatFunc<K> v) {
        SOERGEL_REQUIRE(t < tgt_.components() && s < src_.components(),
                        "entry (", t, ",", s, ") out of range");
        if (v.is_zero()) {
            entries_.erase({t, s});
            return;
        }
        SOERGEL_REQUIRE(tgt_.pi_images(t) == src_.pi_images(s), "entry (", t, ",", s,
                        ") crosses the block decomposition");
        entries_[{t, s}] = std::move(v);
    }

    const RatFunc<K>& entry(unsigned t, unsigned s) const {
        static const RatFunc<K> zero{};
        auto it = entries_.find({t, s});
        return it == entries_.end() ? zero : it->second;
    }

    const Entries& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    friend bool operator==(const LocMatrix& a, const LocMatrix& b) {
        return a.src_.word() == b.src_.word() && a.tgt_.word() == b.tgt_.word() &&
               a.entries_ == b.entries_;
    }
    friend bool operator!=(const LocMatrix& a, const LocMatrix& b) { return !(a == b); }

    friend LocMatrix operator+(const LocMatrix& a, const LocMatrix& b) {
        SOERGEL_REQUIRE(a.src_.word() == b.src_.word() && a.tgt_.word() == b.tgt_.word(),
                        "matrix sum boundary mismatch");
        LocMatrix out = a;
        for (const auto& [key, v] : b.entries_) {
            auto it = out.entries_.find(key);
            if (it == out.entries_.end()) {
                out.entries_.emplace(key, v);
            } else {
                it->second = it->second + v;
                if (it->second.is_zero()) out.entries_.erase(it);
            }
        }
        return out;
    }

    friend LocMatrix operator-(const LocMatrix& a, const LocMatrix& b) {
        SOERGEL_REQUIRE(a.src_.word() == b.src_.word() && a.tgt_.word() == b.tgt_.word(),
                        "matrix difference boundary mismatch");
        LocMatrix out = a;
        for (const auto& [key, v] : b.entries_) {
            auto it = out.entries_.find(key);
            if (it == out.entries_.end()) {
                out.entries_.emplace(key, -v);
            } else {
                it->second = it->second - v;
                if (it->second.is_zero()) out.entries_.erase(it);
            }
        }
        return out;
    }

    friend LocMatrix operator*(const LocMatrix& a, const LocMatrix& b) {
        SOERGEL_REQUIRE(a.src_.word() == b.tgt_.word(), "composition boundary mismatch");
        LocMatrix out(b.src_, a.tgt_);
        for (const auto& [ka, va] : a.entries_) {
            auto it = b.entries_.lower_bound({ka.second, 0});
            for (; it != b.entries_.end() && it->first.first == ka.second; ++it) {
                RatFunc<K> prod = va * it->second;
                if (prod.is_zero()) continue;
                std::pair<unsigned, unsigned> key{ka.first, it->first.second};
                auto slot = out.entries_.find(key);
                if (slot == out.entries_.end()) {
                    out.entries_.emplace(key, std::move(prod));
                } else {
                    slot->second = slot->second + prod;
                    if (slot->second.is_zero()) out.entries_.erase(slot);
                }
            }
        }
        return out;
    }

    LocMatrix scaled(const K& c) const {
        LocMatrix out(src_, tgt_);
        for (const auto& [key, v] : entries_) {
            RatFunc<K> nv = v.scaled(c);
            if (!nv.is_zero()) out.entries_.emplace(key, std::move(nv));
        }
        return out;
    }

    LocMatrix scaled_poly(const Poly<K>& f) const {
        LocMatrix out(src_, tgt_);
        for (const auto& [key, v] : entries_) {
            RatFunc<K> nv = v.mul_poly(f);
            if (!nv.is_zero()) out.entries_.emplace(key, std::move(nv));
        }
        return out;
    }

    RatFunc<K> trace() const {
        SOERGEL_REQUIRE(src_.word() == tgt_.word(), "trace of a non-endomorphism");
        RatFunc<K> t;
        for (const auto& [key, v] : entries_)
            if (key.first == key.second) t = t + v;
        return t;
    }

    std::vector<RatFunc<K>> apply(const std::vector<RatFunc<K>>& coords) const {
        SOERGEL_REQUIRE(coords.size() == src_.components(), "coordinate vector length mismatch");
        std::vector<RatFunc<K>> out(tgt_.components());
        for (const auto& [key, v] : entries_) {
            if (coords[key.second].is_zero()) continue;
            out[key.first] = out[key.first] + v * coords[key.second];
        }
        return out;
    }

  private:
    friend class Localization<K>;
    void raw_insert(unsigned t, unsigned s, RatFunc<K> v) {
        if (!v.is_zero()) entries_[{t, s}] = std::move(v);
    }
    LocObject<K> src_, tgt_;
    Entries entries_;
};

template <class K>
struct IntegralElement {
    ObjWord word;
    std::map<unsigned, Poly<K>> coeffs;
};

template <class K>
struct TopIdempotentResult {
    LocMatrix<K> idem;
    std::vector<Word> peeled;
    std::vector<std::string> notes;
};

namespace detail {

template <class K>
struct LocState {
    std::shared_ptr<const Realization<K>> r;
    int degree_cap = 64;
    std::map<std::string, std::shared_ptr<LocObjectData<K>>> objects;
    std::map<std::pair<Gen, Gen>, std::vector<Poly<K>>> thick_bases;
    std::map<std::string, std::vector<std::vector<RatFunc<K>>>> slot_inverses;
    std::map<std::string, std::vector<std::vector<RatFunc<K>>>> basis_coords;   // [j][e]
    std::map<std::string, std::vector<std::vector<RatFunc<K>>>> basis_inverse;  // [e][j]
    std::map<std::string, std::vector<std::vector<std::map<unsigned, Poly<K>>>>> structure;
    std::map<std::pair<Gen, Gen>, LocMatrix<K>> six;
    std::map<std::pair<Gen, Gen>, std::pair<LocMatrix<K>, LocMatrix<K>>> thick_tri;
    std::map<std::string, LocMatrix<K>> ttri;
    std::map<std::string, TopIdempotentResult<K>> tops;
    std::map<std::string, Laurent> ranks;
    std::optional<Hecke> hecke;
};

} // namespace detail

template <class K>
class Localization {
  public:
    using TopIdempotent = TopIdempotentResult<K>;
    enum class Verdict { equal, equal_under_localization, different };

    explicit Localization(const Realization<K>& r, bool faithful = true)
        : state_(std::make_shared<detail::LocState<K>>()), faithful_(faithful) {
        state_->r = std::make_shared<const Realization<K>>(r);
    }

    const Realization<K>& realization() const { return *state_->r; }
    bool faithful() const { return faithful_; }
    void set_degree_cap(int cap) const { state_->degree_cap = cap; }

    LocObject<K> object(const ObjWord& w) const { return LocObject<K>(object_data(w)); }

    // coordinates of f_0 (x) ... (x) f_d: component e multiplies each factor by
    // the group element accumulated from the slots to its left
    std::vector<RatFunc<K>> coords(const LocObject<K>& obj,
                                   const std::vector<Poly<K>>& tensor) const {
        const auto& d = *obj.d_;
        SOERGEL_REQUIRE(tensor.size() == d.slots.size() + 1, "tensor needs ", d.slots.size() + 1,
                        " factors, got ", tensor.size());
        std::vector<RatFunc<K>> out(d.comps);
        const K one = d.r->ctx().one();
        for (unsigned e = 0; e < d.comps; ++e) {
            auto digs = d.digits(e);
            std::vector<Poly<K>> img = d.var_images();
            Poly<K> acc = tensor[0];
            for (std::size_t k = 0; k < d.slots.size(); ++k) {
                d.apply_letter(d.slots[k].letters[digs[k]], img);
                acc *= tensor[k + 1].substitute(img, one);
            }
            out[e] = RatFunc<K>(std::move(acc));
        }
        return out;
    }

    std::vector<RatFunc<K>> coords(const IntegralElement<K>& elt) const {
        LocObject<K> obj = object(elt.word);
        const auto& bc = basis_coords(obj);
        std::vector<RatFunc<K>> out(obj.components());
        for (const auto& [j, cf] : elt.coeffs) {
            SOERGEL_REQUIRE(j < obj.components(), "coefficient index ", j, " out of range");
            if (cf.is_zero()) continue;
            for (unsigned e = 0; e < obj.components(); ++e) {
                if (bc[j][e].is_zero()) continue;
                out[e] = out[e] + bc[j][e].mul_poly(cf);
            }
        }
        return out;
    }

    IntegralElement<K> expand_integral(const LocObject<K>& obj,
                                       const std::vector<RatFunc<K>>& values) const {
        std::string err;
        auto r = expand_checked(obj, values, &err);
        SOERGEL_REQUIRE(r.has_value(), "expand_integral: ", err);
        return IntegralElement<K>{obj.word(), std::move(*r)};
    }

    std::optional<IntegralElement<K>> try_expand_integral(
        const LocObject<K>& obj, const std::vector<RatFunc<K>>& values) const {
        auto r = expand_checked(obj, values, nullptr);
        if (!r) return std::nullopt;
        return IntegralElement<K>{obj.word(), std::move(*r)};
    }

    LocMatrix<K> identity_matrix(const ObjWord& w) const {
        LocObject<K> o = object(w);
        LocMatrix<K> m(o, o);
        RatFunc<K> one = rf_one();
        for (unsigned e = 0; e < o.components(); ++e) m.raw_insert(e, e, one);
        return m;
    }

    LocMatrix<K> evaluate(const MorphismSum<K>& m) const {
        LocMatrix<K> acc(object(m.src()), object(m.tgt()));
        for (const auto& [key, tc] : m.terms()) {
            LocMatrix<K> cur = identity_matrix(tc.first.bottom);
            for (const auto& slice : tc.first.slices) {
                LocMatrix<K> row = identity_matrix({});
                for (const auto& g : slice.gens) row = htensor(row, atom_matrix(g));
                cur = row * cur;
            }
            acc = acc + cur.scaled(tc.second);
        }
        return acc;
    }

    // solver basis of degree-`degree` maps BS(src) -> BS(tgt) that preserve the
    // integral forms; over Int each vector is primitive
    std::vector<LocMatrix<K>> hom_basis(const ObjWord& src, const ObjWord& tgt,
                                        int degree) const {
        SOERGEL_REQUIRE(degree <= state_->degree_cap && -degree <= state_->degree_cap,
                        "hom_basis: degree ", degree, " exceeds the degree cap ",
                        state_->degree_cap);
        LocObject<K> xo = object(src), yo = object(tgt);
        int par = degree + yo.degree_shift() - xo.degree_shift();
        if (((par % 2) + 2) % 2 != 0) return {};
        int delta = par / 2;
        const unsigned Nx = xo.components(), Ny = yo.components();
        const unsigned nvars = state_->r->nvars();

        std::vector<int> fdx = factor_degrees(xo), fdy = factor_degrees(yo);
        struct Unknown {
            unsigned j, k;
            Monomial m;
        };
        std::vector<Unknown> unknowns;
        for (unsigned j = 0; j < Nx; ++j)
            for (unsigned k = 0; k < Ny; ++k) {
                int D = fdx[j] - fdy[k] + delta;
                if (D < 0) continue;
                for (auto& mono : detail::monomials_of_degree(unsigned(D), nvars))
                    unknowns.push_back({j, k, std::move(mono)});
            }
        if (unknowns.empty()) return {};

        const auto& SX = structure_constants(xo);
        const auto& TY = structure_constants(yo);

        // right multiplication by each variable must intertwine; rows are keyed
        // by (variable, source tensor, target tensor, monomial)
        using RowKey = std::tuple<unsigned, unsigned, unsigned, Monomial>;
        std::map<RowKey, std::map<unsigned, K>> rows;
        for (unsigned u = 0; u < unknowns.size(); ++u) {
            const Unknown& un = unknowns[u];
            for (unsigned i = 0; i < nvars; ++i) {
                for (unsigned j = 0; j < Nx; ++j) {
                    auto it = SX[j][i].find(un.j);
                    if (it == SX[j][i].end()) continue;
                    for (const auto& [mono, a] : it->second.terms()) {
                        auto& cell = rows[{i, j, un.k, mono * un.m}][u];
                        cell = cell + a;
                    }
                }
                for (const auto& [l, tp] : TY[un.k][i])
                    for (const auto& [mono, b] : tp.terms()) {
                        auto& cell = rows[{i, un.j, l, mono * un.m}][u];
                        cell = cell - b;
                    }
            }
        }

        std::vector<std::map<unsigned, K>> kernel;
        if constexpr (std::is_same_v<K, Int>) {
            std::vector<std::map<unsigned, Rat>> rv;
            for (auto& [key, row] : rows) {
                std::map<unsigned, Rat> qrow;
                for (const auto& [u, c] : row)
                    if (c != 0) qrow.emplace(u, Rat(c));
                if (!qrow.empty()) rv.push_back(std::move(qrow));
            }
            auto qk = detail::kernel_basis<Rat>(std::move(rv), unsigned(unknowns.size()), Rat(1));
            for (const auto& v : qk) kernel.push_back(detail::primitive_int_vector(v));
        } else {
            std::vector<std::map<unsigned, K>> rv;
            for (auto& [key, row] : rows) {
                std::map<unsigned, K> frow;
                for (const auto& [u, c] : row)
                    if (!RingTraits<K>::is_zero(c)) frow.emplace(u, c);
                if (!frow.empty()) rv.push_back(std::move(frow));
            }
            kernel = detail::kernel_basis<K>(std::move(rv), unsigned(unknowns.size()),
                                             state_->r->ctx().one());
        }

        const auto& BX = basis_inverse(xo);  // [e][j]: tensor expansion of each unit vector
        const auto& BY = basis_coords(yo);   // [k][e]
        std::vector<LocMatrix<K>> out;
        for (const auto& vec : kernel) {
            std::vector<std::vector<Poly<K>>> C(Ny, std::vector<Poly<K>>(Nx));
            for (const auto& [u, val] : vec)
                C[unknowns[u].k][unknowns[u].j].add_term(unknowns[u].m, val);
            LocMatrix<K> M(xo, yo);
            for (unsigned f = 0; f < Nx; ++f) {
                std::vector<RatFunc<K>> uk(Ny);
                for (unsigned k = 0; k < Ny; ++k)
                    for (unsigned j = 0; j < Nx; ++j) {
                        if (C[k][j].is_zero() || BX[f][j].is_zero()) continue;
                        uk[k] = uk[k] + BX[f][j].mul_poly(C[k][j]);
                    }
                for (unsigned e = 0; e < Ny; ++e) {
                    RatFunc<K> val;
                    for (unsigned k = 0; k < Ny; ++k) {
                        if (uk[k].is_zero() || BY[k][e].is_zero()) continue;
                        val = val + BY[k][e] * uk[k];
                    }
                    M.set_entry(e, f, std::move(val));
                }
            }
            out.push_back(std::move(M));
        }
        return out;
    }

    // matrix of the six valent vertex, normalized to fix the coordinate vector
    // of the all-ones tensor
    const LocMatrix<K>& six_valent_matrix(Gen s, Gen t) const {
        auto it = state_->six.find({s, t});
        if (it != state_->six.end()) return it->second;
        SOERGEL_REQUIRE(state_->r->graph().adjacent(s, t),
                        "six valent vertex needs adjacent colors");
        ObjWord X{Strand::thin(s), Strand::thin(t), Strand::thin(s)};
        ObjWord Y{Strand::thin(t), Strand::thin(s), Strand::thin(t)};
        auto basis = hom_basis(X, Y, 0);
        SOERGEL_REQUIRE(basis.size() == 1, "six valent vertex: hom space not 1-dimensional (",
                        basis.size(), ")");
        LocMatrix<K> M = std::move(basis[0]);
        std::vector<RatFunc<K>> ones(M.src().components(), rf_one());
        auto img = M.apply(ones);
        RatFunc<K> mu = img.at(0);
        for (const auto& v : img)
            SOERGEL_REQUIRE(v == mu, "six valent vertex: image of the ones vector is not scalar");
        K c = constant_of(mu, "six valent normalization");
        SOERGEL_REQUIRE(RingTraits<K>::invertible(c),
                        "six valent vertex: normalization scalar not invertible");
        M = M.scaled(RingTraits<K>::inverse(c));
        return state_->six.emplace(std::pair<Gen, Gen>{s, t}, std::move(M)).first->second;
    }

    // basis of R over the invariants of an adjacent pair: dual degree-1
    // generators u_lo, u_hi and their products, corrected so the trace pairing
    // against the complementary degrees is unimodular
    const std::vector<Poly<K>>& thick_basis(Gen a, Gen b) const {
        Strand st = Strand::thick(a, b);
        Gen lo = st.lo, hi = st.hi;
        auto it = state_->thick_bases.find({lo, hi});
        if (it != state_->thick_bases.end()) return it->second;
        const Realization<K>& r = *state_->r;
        SOERGEL_REQUIRE(r.graph().adjacent(lo, hi), "thick strand needs adjacent colors");
        const Poly<K>&wa = r.omega(lo), &wb = r.omega(hi);
        K d11 = constant_of_poly(r.demazure(lo, wa));
        K d12 = constant_of_poly(r.demazure(lo, wb));
        K d21 = constant_of_poly(r.demazure(hi, wa));
        K d22 = constant_of_poly(r.demazure(hi, wb));
        K det = d11 * d22 - d12 * d21;
        SOERGEL_REQUIRE(RingTraits<K>::invertible(det),
                        "thick basis: fundamental weight pairing not unimodular");
        K inv = RingTraits<K>::inverse(det);
        Poly<K> ua = wa.scaled(inv * d22) + wb.scaled(-(inv * d21));
        Poly<K> ub = wa.scaled(-(inv * d12)) + wb.scaled(inv * d11);
        SOERGEL_REQUIRE(r.demazure(lo, ua) == r.constant(1) && r.demazure(hi, ua).is_zero() &&
                            r.demazure(lo, ub).is_zero() && r.demazure(hi, ub) == r.constant(1),
                        "thick basis: dual generators failed their defining equations");
        auto pair = [&](const Poly<K>& f, const Poly<K>& g) {
            return constant_of_poly(r.demazure(lo, r.demazure(hi, r.demazure(lo, f * g))));
        };
        Poly<K> uu = ua * ub;
        K c2 = pair(ua, uu);
        SOERGEL_REQUIRE(RingTraits<K>::invertible(c2),
                        "thick basis: degree pairing <u_lo, u_lo u_hi> not invertible");
        K corr = pair(ua, ua * ua) * RingTraits<K>::inverse(c2);
        Poly<K> b4 = ua * ua - uu.scaled(corr);
        std::vector<Poly<K>> basis{r.constant(1), ua, ub, uu, b4, ua * ua * ub};
        SOERGEL_REQUIRE(RingTraits<K>::is_zero(pair(ua, b4)),
                        "thick basis: correction failed to orthogonalize");
        K gram = c2 * pair(ub, b4);
        SOERGEL_REQUIRE(RingTraits<K>::invertible(gram),
                        "thick basis: middle Gram block not unimodular");
        SOERGEL_REQUIRE(RingTraits<K>::invertible(pair(r.constant(1), basis[5])),
                        "thick basis: top pairing not unimodular");
        return state_->thick_bases.emplace(std::pair<Gen, Gen>{lo, hi}, std::move(basis))
            .first->second;
    }

    // peel the summands indexed by shorter subword products; what is left is
    // the projector to the top summand
    TopIdempotentResult<K> top_idempotent(const Word& w) const {
        std::string wkey = detail::word_key(w);
        auto cached = state_->tops.find(wkey);
        if (cached != state_->tops.end()) return cached->second;
        const unsigned n = unsigned(w.size());
        SOERGEL_REQUIRE(n <= 16, "top_idempotent: subword enumeration capped at 16 letters, got ",
                        n);
        const Realization<K>& r = *state_->r;
        const unsigned nvars = r.nvars();

        struct Cand {
            unsigned len;
            Word word;
        };
        std::map<std::string, Cand> cands;
        std::vector<std::vector<Poly<K>>> imgs(std::size_t(1) << n);
        {
            std::vector<Poly<K>> base;
            for (unsigned i = 1; i <= nvars; ++i) base.push_back(r.var(i));
            imgs[0] = std::move(base);
        }
        std::string full_key;
        for (std::size_t mask = 0; mask < imgs.size(); ++mask) {
            if (mask) {
                unsigned low = unsigned(std::countr_zero(mask));
                const auto& prev = imgs[mask & (mask - 1)];
                std::vector<Poly<K>> cur;
                cur.reserve(prev.size());
                for (const auto& f : prev) cur.push_back(r.act_gen(w[low], f));
                imgs[mask] = std::move(cur);
            }
            Word sub;
            for (unsigned i = 0; i < n; ++i)
                if (mask & (std::size_t(1) << i)) sub.push_back(w[i]);
            std::string key;
            for (const auto& f : imgs[mask]) {
                key += f.str();
                key += ';';
            }
            unsigned len = unsigned(std::popcount(mask));
            auto [it, fresh] = cands.try_emplace(key, Cand{len, sub});
            if (!fresh && (len < it->second.len ||
                           (len == it->second.len && sub < it->second.word)))
                it->second = Cand{len, std::move(sub)};
            if (mask + 1 == imgs.size()) full_key = std::move(key);
        }
        imgs.clear();
        auto fit = cands.find(full_key);
        SOERGEL_REQUIRE(fit != cands.end() && fit->second.len == n,
                        "top_idempotent: the word is not reduced");
        cands.erase(fit);

        std::vector<Cand> order;
        order.reserve(cands.size());
        for (auto& [key, c] : cands) order.push_back(std::move(c));
        std::sort(order.begin(), order.end(), [](const Cand& a, const Cand& b) {
            return a.len != b.len ? a.len > b.len : a.word < b.word;
        });

        ObjWord ww = thin_word(w);
        TopIdempotentResult<K> res{identity_matrix(ww), {}, {}};
        for (const auto& cand : order) {
            const Word& z = cand.word;
            const int kmax = int(n) - int(cand.len);
            const Laurent& rank = cached_rank(w, z);
            ObjWord zw = thin_word(z);
            LocMatrix<K> ez =
                z.empty() ? identity_matrix({}) : top_idempotent(z).idem;
            for (int k = -kmax; k <= kmax; k += 2) {
                if (hom_dim_predicted(rank, nvars, k) <= 0 ||
                    hom_dim_predicted(rank, nvars, -k) <= 0)
                    continue;
                auto P = hom_basis(ww, zw, k);
                auto I = hom_basis(zw, ww, -k);
                bool again = true;
                while (again) {
                    again = false;
                    for (const auto& p : P) {
                        LocMatrix<K> pt = ez * (p * res.idem);
                        if (pt.is_zero()) continue;
                        for (const auto& i : I) {
                            LocMatrix<K> im = (res.idem * i) * ez;
                            if (im.is_zero()) continue;
                            LocMatrix<K> pr = pt * im;
                            if (pr.is_zero()) continue;
                            auto e0 = ez.entries().begin();
                            RatFunc<K> lam =
                                pr.entry(e0->first.first, e0->first.second) / e0->second;
                            bool scalar = pr.entries().size() == ez.entries().size();
                            if (scalar)
                                for (const auto& [key, v] : ez.entries())
                                    if (!(pr.entry(key.first, key.second) == v * lam)) {
                                        scalar = false;
                                        break;
                                    }
                            if (!scalar) {
                                res.notes.push_back(detail::concat(
                                    "pairing against (", detail::word_key(z), ") at degree ", k,
                                    " is not a multiple of the idempotent"));
                                continue;
                            }
                            if (!lam.is_poly() ||
                                !(lam.to_poly().is_zero() ||
                                  lam.to_poly().total_degree() == 0u)) {
                                res.notes.push_back(detail::concat(
                                    "pairing against (", detail::word_key(z), ") at degree ", k,
                                    " is not constant: ", lam.str()));
                                continue;
                            }
                            K lc = lam.to_poly().constant_term();
                            if (!RingTraits<K>::invertible(lc)) {
                                res.notes.push_back(detail::concat(
                                    "pairing ", RingTraits<K>::str(lc), " against (",
                                    detail::word_key(z), ") at degree ", k,
                                    " is not invertible"));
                                continue;
                            }
                            res.idem =
                                res.idem - im.scaled(RingTraits<K>::inverse(lc)) * pt;
                            res.peeled.push_back(z);
                            again = true;
                            break;
                        }
                        if (again) break;
                    }
                }
            }
        }
        return state_->tops.emplace(std::move(wkey), std::move(res)).first->second;
    }

    Verdict compare(const MorphismSum<K>& a, const MorphismSum<K>& b) const {
        if (evaluate(a) == evaluate(b))
            return faithful_ ? Verdict::equal : Verdict::equal_under_localization;
        return Verdict::different;
    }

  private:
    std::shared_ptr<detail::LocState<K>> state_;
    bool faithful_ = true;

    RatFunc<K> rf_one() const { return RatFunc<K>(Poly<K>(state_->r->ctx().one())); }

    static ObjWord thin_word(const Word& w) {
        ObjWord o;
        o.reserve(w.size());
        for (Gen g : w) o.push_back(Strand::thin(g));
        return o;
    }

    static K constant_of_poly(const Poly<K>& p) {
        SOERGEL_REQUIRE(p.is_zero() || p.total_degree() == 0u,
                        "expected a constant, got ", p.str());
        return p.constant_term();
    }

    static K constant_of(const RatFunc<K>& q, const char* what) {
        SOERGEL_REQUIRE(q.is_poly(), what, ": value ", q.str(), " is not a polynomial");
        return constant_of_poly(q.to_poly());
    }

    std::shared_ptr<detail::LocObjectData<K>> object_data(const ObjWord& w) const {
        std::string key = obj_str(w);
        auto it = state_->objects.find(key);
        if (it != state_->objects.end()) return it->second;
        auto d = std::make_shared<detail::LocObjectData<K>>();
        d->r = state_->r;
        d->word = w;
        const Realization<K>& r = *state_->r;
        for (const Strand& st : w) {
            detail::LocSlot<K> sl;
            sl.strand = st;
            if (!st.is_thick()) {
                Gen s = st.lo;
                SOERGEL_REQUIRE(s < r.rank(), "strand color ", unsigned(s), " out of range");
                sl.radix = 2;
                sl.letters = {Word{}, Word{s}};
                sl.factors = {r.constant(1), r.omega(s)};
                d->shift += 1;
            } else {
                Gen a = st.lo, b = st.hi;
                SOERGEL_REQUIRE(b < r.rank(), "strand color ", unsigned(b), " out of range");
                sl.radix = 6;
                sl.letters = {Word{}, Word{a}, Word{b}, Word{a, b}, Word{b, a}, Word{a, b, a}};
                sl.factors = thick_basis(a, b);
                d->shift += 3;
            }
            for (const auto& f : sl.factors)
                sl.factor_degrees.push_back(f.is_zero() ? 0u : *f.total_degree());
            d->slots.push_back(std::move(sl));
        }
        d->strides.assign(d->slots.size(), 1);
        for (std::size_t k = d->slots.size(); k-- > 0;) {
            if (k + 1 < d->slots.size()) d->strides[k] = d->strides[k + 1] * d->slots[k + 1].radix;
            SOERGEL_REQUIRE(d->comps <= (1u << 24) / d->slots[k].radix,
                            "localized object too large");
            d->comps *= d->slots[k].radix;
        }
        d->image_cache.resize(d->comps);
        d->image_built.assign(d->comps, 0);
        state_->objects.emplace(std::move(key), d);
        return d;
    }

    std::string slot_key(const detail::LocSlot<K>& sl) const {
        if (!sl.strand.is_thick()) return detail::concat("t", unsigned(sl.strand.lo));
        return detail::concat("T", unsigned(sl.strand.lo), "_", unsigned(sl.strand.hi));
    }

    // inverse of the matrix (letter_j applied to factor_m); twisting it by a
    // prefix automorphism entrywise gives the inverse of the twisted matrix
    const std::vector<std::vector<RatFunc<K>>>& slot_inverse(
        const detail::LocSlot<K>& sl) const {
        std::string key = slot_key(sl);
        auto it = state_->slot_inverses.find(key);
        if (it != state_->slot_inverses.end()) return it->second;
        const Realization<K>& r = *state_->r;
        unsigned n = sl.radix;
        std::vector<std::vector<RatFunc<K>>> V(n, std::vector<RatFunc<K>>(n));
        for (unsigned j = 0; j < n; ++j)
            for (unsigned m = 0; m < n; ++m)
                V[j][m] = RatFunc<K>(r.act_group(sl.letters[j], sl.factors[m]));
        auto inv = detail::rf_inverse(std::move(V), rf_one());
        return state_->slot_inverses.emplace(std::move(key), std::move(inv)).first->second;
    }

    // expansion over the tensor basis; entries may keep denominators
    std::vector<RatFunc<K>> expand_layers(const LocObject<K>& obj,
                                          const std::vector<RatFunc<K>>& values) const {
        const auto& d = *obj.d_;
        SOERGEL_REQUIRE(values.size() == d.comps, "coordinate vector length mismatch");
        const K one = d.r->ctx().one();
        struct Layer {
            std::vector<unsigned> digs;
            std::vector<RatFunc<K>> vals;
        };
        std::vector<Layer> layers;
        layers.push_back({{}, values});
        for (std::size_t k = d.slots.size(); k-- > 0;) {
            const auto& sl = d.slots[k];
            const auto& Vinv = slot_inverse(sl);
            const unsigned rx = sl.radix;
            const unsigned pc = unsigned(layers[0].vals.size()) / rx;
            std::vector<Layer> next;
            next.reserve(layers.size() * rx);
            for (const auto& layer : layers)
                for (unsigned m = 0; m < rx; ++m) {
                    Layer nl;
                    nl.digs.reserve(layer.digs.size() + 1);
                    nl.digs.push_back(m);
                    nl.digs.insert(nl.digs.end(), layer.digs.begin(), layer.digs.end());
                    nl.vals.assign(pc, RatFunc<K>{});
                    next.push_back(std::move(nl));
                }
            std::vector<std::vector<RatFunc<K>>> tw(rx, std::vector<RatFunc<K>>(rx));
            for (unsigned p = 0; p < pc; ++p) {
                std::vector<Poly<K>> img = d.var_images();
                unsigned rem = p;
                for (std::size_t kk = 0; kk < k; ++kk) {
                    unsigned stride = 1;
                    for (std::size_t jj = kk + 1; jj < k; ++jj) stride *= d.slots[jj].radix;
                    unsigned digit = rem / stride;
                    rem %= stride;
                    d.apply_letter(d.slots[kk].letters[digit], img);
                }
                bool trivial = p == 0;
                for (unsigned m = 0; m < rx; ++m)
                    for (unsigned j = 0; j < rx; ++j)
                        tw[m][j] = Vinv[m][j].is_zero()
                                       ? RatFunc<K>{}
                                       : (trivial ? Vinv[m][j]
                                                  : Vinv[m][j].substitute(img, one));
                for (std::size_t li = 0; li < layers.size(); ++li) {
                    const auto& v = layers[li].vals;
                    for (unsigned m = 0; m < rx; ++m) {
                        RatFunc<K> acc;
                        for (unsigned j = 0; j < rx; ++j) {
                            if (tw[m][j].is_zero() || v[p * rx + j].is_zero()) continue;
                            acc = acc + tw[m][j] * v[p * rx + j];
                        }
                        next[li * rx + m].vals[p] = std::move(acc);
                    }
                }
            }
            layers = std::move(next);
        }
        std::vector<RatFunc<K>> out(d.comps);
        for (auto& layer : layers) out[d.index(layer.digs)] = std::move(layer.vals[0]);
        return out;
    }

    std::optional<std::map<unsigned, Poly<K>>> expand_checked(
        const LocObject<K>& obj, const std::vector<RatFunc<K>>& values,
        std::string* err) const {
        auto flat = expand_layers(obj, values);
        std::map<unsigned, Poly<K>> out;
        for (unsigned j = 0; j < flat.size(); ++j) {
            if (flat[j].is_zero()) continue;
            if (!flat[j].is_poly()) {
                if (err)
                    *err = detail::concat("not integral: component ", j,
                                          " keeps the denominator ", flat[j].str());
                return std::nullopt;
            }
            out.emplace(j, flat[j].to_poly());
        }
        return out;
    }

    std::vector<int> factor_degrees(const LocObject<K>& obj) const {
        const auto& d = *obj.d_;
        std::vector<int> out(d.comps);
        for (unsigned e = 0; e < d.comps; ++e) {
            auto digs = d.digits(e);
            int s = 0;
            for (std::size_t k = 0; k < d.slots.size(); ++k)
                s += int(d.slots[k].factor_degrees[digs[k]]);
            out[e] = s;
        }
        return out;
    }

    std::vector<Poly<K>> basis_tensor(const LocObject<K>& obj, unsigned j) const {
        const auto& d = *obj.d_;
        auto digs = d.digits(j);
        std::vector<Poly<K>> tensor;
        tensor.reserve(d.slots.size() + 1);
        tensor.push_back(d.r->constant(1));
        for (std::size_t k = 0; k < d.slots.size(); ++k)
            tensor.push_back(d.slots[k].factors[digs[k]]);
        return tensor;
    }

    const std::vector<std::vector<RatFunc<K>>>& basis_coords(const LocObject<K>& obj) const {
        std::string key = obj_str(obj.word());
        auto it = state_->basis_coords.find(key);
        if (it != state_->basis_coords.end()) return it->second;
        std::vector<std::vector<RatFunc<K>>> bc(obj.components());
        for (unsigned j = 0; j < obj.components(); ++j) bc[j] = coords(obj, basis_tensor(obj, j));
        return state_->basis_coords.emplace(std::move(key), std::move(bc)).first->second;
    }

    const std::vector<std::vector<RatFunc<K>>>& basis_inverse(const LocObject<K>& obj) const {
        std::string key = obj_str(obj.word());
        auto it = state_->basis_inverse.find(key);
        if (it != state_->basis_inverse.end()) return it->second;
        std::vector<std::vector<RatFunc<K>>> bi(obj.components());
        for (unsigned e = 0; e < obj.components(); ++e) {
            std::vector<RatFunc<K>> unit(obj.components());
            unit[e] = rf_one();
            bi[e] = expand_layers(obj, unit);
        }
        return state_->basis_inverse.emplace(std::move(key), std::move(bi)).first->second;
    }

    // structure constants of right multiplication by the variables over the
    // tensor basis; integrality here is an invariant of the construction
    const std::vector<std::vector<std::map<unsigned, Poly<K>>>>& structure_constants(
        const LocObject<K>& obj) const {
        std::string key = obj_str(obj.word());
        auto it = state_->structure.find(key);
        if (it != state_->structure.end()) return it->second;
        const unsigned nvars = state_->r->nvars();
        const auto& bc = basis_coords(obj);
        std::vector<std::vector<std::map<unsigned, Poly<K>>>> S(
            obj.components(), std::vector<std::map<unsigned, Poly<K>>>(nvars));
        for (unsigned j = 0; j < obj.components(); ++j)
            for (unsigned i = 0; i < nvars; ++i) {
                std::vector<RatFunc<K>> vals(obj.components());
                for (unsigned e = 0; e < obj.components(); ++e) {
                    if (bc[j][e].is_zero()) continue;
                    vals[e] = bc[j][e].mul_poly(obj.pi_images(e)[i]);
                }
                std::string err;
                auto exp = expand_checked(obj, vals, &err);
                SOERGEL_REQUIRE(exp.has_value(),
                                "structure constants must expand integrally: ", err);
                S[j][i] = std::move(*exp);
            }
        return state_->structure.emplace(std::move(key), std::move(S)).first->second;
    }

    // horizontal tensor: the right factor is twisted by the group element of
    // the left factor's source component
    LocMatrix<K> htensor(const LocMatrix<K>& A, const LocMatrix<K>& B) const {
        ObjWord sw = A.src().word(), tw = A.tgt().word();
        sw.insert(sw.end(), B.src().word().begin(), B.src().word().end());
        tw.insert(tw.end(), B.tgt().word().begin(), B.tgt().word().end());
        LocMatrix<K> out(object(sw), object(tw));
        const unsigned bs = B.src().components(), bt = B.tgt().components();
        const K one = state_->r->ctx().one();
        for (const auto& [ka, va] : A.entries()) {
            const bool trivial = ka.second == 0;
            const auto& img = A.src().pi_images(ka.second);
            for (const auto& [kb, vb] : B.entries()) {
                RatFunc<K> tv = trivial ? vb : vb.substitute(img, one);
                if (tv.is_zero()) continue;
                out.raw_insert(ka.first * bt + kb.first, ka.second * bs + kb.second, va * tv);
            }
        }
        return out;
    }

    LocMatrix<K> atom_matrix(const DGen<K>& g) const {
        const Realization<K>& r = *state_->r;
        switch (g.kind) {
            case DgKind::identity:
                return identity_matrix({g.strand});
            case DgKind::box: {
                LocMatrix<K> m(object({}), object({}));
                m.set_entry(0, 0, RatFunc<K>(g.f));
                return m;
            }
            case DgKind::startdot: {
                LocMatrix<K> m(object({}), object({Strand::thin(g.s)}));
                m.set_entry(0, 0, RatFunc<K>(r.root(g.s)));
                return m;
            }
            case DgKind::enddot: {
                LocMatrix<K> m(object({Strand::thin(g.s)}), object({}));
                m.set_entry(0, 0, rf_one());
                return m;
            }
            case DgKind::split: {
                LocMatrix<K> m(object({Strand::thin(g.s)}), object(g.tgt()));
                RatFunc<K> one = rf_one();
                m.set_entry(0, 0, one);
                m.set_entry(3, 0, one);
                m.set_entry(1, 1, one);
                m.set_entry(2, 1, one);
                return m;
            }
            case DgKind::merge: {
                LocMatrix<K> m(object(g.src()), object({Strand::thin(g.s)}));
                Poly<K> a = r.root(g.s);
                Poly<K> one = r.constant(1), neg = r.constant(-1);
                m.set_entry(0, 0, RatFunc<K>::fraction(one, a));
                m.set_entry(0, 3, RatFunc<K>::fraction(neg, a));
                m.set_entry(1, 1, RatFunc<K>::fraction(one, a));
                m.set_entry(1, 2, RatFunc<K>::fraction(neg, a));
                return m;
            }
            case DgKind::cross: {
                LocMatrix<K> m(object(g.src()), object(g.tgt()));
                RatFunc<K> one = rf_one();
                for (unsigned a = 0; a < 2; ++a)
                    for (unsigned b = 0; b < 2; ++b) m.set_entry(b * 2 + a, a * 2 + b, one);
                return m;
            }
            case DgKind::six:
                return six_valent_matrix(g.s, g.t);
            case DgKind::thick_split:
                return thick_pair(g.s, g.t).first;
            case DgKind::thick_merge:
                return thick_pair(g.s, g.t).second;
            case DgKind::ttri_dr:
            case DgKind::ttri_dl:
            case DgKind::ttri_ur:
            case DgKind::ttri_ul:
                return ttri_matrix(g.kind, g.s, g.t, g.c);
        }
        SOERGEL_REQUIRE(false, "no matrix for generator ", g.key());
        return {};
    }

    // splitter and merger, normalized so that merge after split is the thick
    // identity; the pairing scalar must be invertible over the base ring
    const std::pair<LocMatrix<K>, LocMatrix<K>>& thick_pair(Gen s, Gen t) const {
        auto it = state_->thick_tri.find({s, t});
        if (it != state_->thick_tri.end()) return it->second;
        ObjWord tw{Strand::thick(s, t)};
        ObjWord out{Strand::thin(s), Strand::thin(t), Strand::thin(s)};
        auto sp = hom_basis(tw, out, 0);
        SOERGEL_REQUIRE(sp.size() == 1, "thick splitter: hom space not 1-dimensional (",
                        sp.size(), ")");
        auto mg = hom_basis(out, tw, 0);
        SOERGEL_REQUIRE(mg.size() == 1, "thick merger: hom space not 1-dimensional (", mg.size(),
                        ")");
        LocMatrix<K> comp = mg[0] * sp[0];
        K c = constant_of(comp.entry(0, 0), "thick pairing");
        SOERGEL_REQUIRE(RingTraits<K>::invertible(c), "thick pairing ", RingTraits<K>::str(c),
                        " is not invertible");
        SOERGEL_REQUIRE(comp == identity_matrix(tw).scaled(c),
                        "thick pairing is not a scalar multiple of the identity");
        std::pair<LocMatrix<K>, LocMatrix<K>> val{std::move(sp[0]),
                                                  mg[0].scaled(RingTraits<K>::inverse(c))};
        return state_->thick_tri.emplace(std::pair<Gen, Gen>{s, t}, std::move(val))
            .first->second;
    }

    // thick trivalents are normalized by absorbing a dot on the thin leg
    const LocMatrix<K>& ttri_matrix(DgKind kind, Gen s, Gen t, Gen c) const {
        std::string key =
            detail::concat(int(kind), "_", unsigned(s), "_", unsigned(t), "_", unsigned(c));
        auto it = state_->ttri.find(key);
        if (it != state_->ttri.end()) return it->second;
        SOERGEL_REQUIRE(c == s || c == t, "thick trivalent: attach color ", unsigned(c),
                        " does not belong to the pair");
        DGen<K> g{kind, s, t, c, Strand{}, {}};
        auto basis = hom_basis(g.src(), g.tgt(), -1);
        SOERGEL_REQUIRE(basis.size() == 1, "thick trivalent: hom space not 1-dimensional (",
                        basis.size(), ")");
        LocMatrix<K> T = std::move(basis[0]);
        ObjWord tw{Strand::thick(s, t)};
        LocMatrix<K> idth = identity_matrix(tw);
        DGen<K> sd{DgKind::startdot, c, 0, 0, Strand{}, {}};
        DGen<K> ed{DgKind::enddot, c, 0, 0, Strand{}, {}};
        LocMatrix<K> probe;
        switch (kind) {
            case DgKind::ttri_dr: probe = T * htensor(idth, atom_matrix(sd)); break;
            case DgKind::ttri_dl: probe = T * htensor(atom_matrix(sd), idth); break;
            case DgKind::ttri_ur: probe = htensor(idth, atom_matrix(ed)) * T; break;
            default: probe = htensor(atom_matrix(ed), idth) * T; break;
        }
        K lc = constant_of(probe.entry(0, 0), "thick trivalent normalization");
        SOERGEL_REQUIRE(RingTraits<K>::invertible(lc), "thick trivalent: dot absorption scalar ",
                        RingTraits<K>::str(lc), " is not invertible");
        SOERGEL_REQUIRE(probe == idth.scaled(lc),
                        "thick trivalent: dot absorption is not a scalar multiple of the identity");
        T = T.scaled(RingTraits<K>::inverse(lc));
        return state_->ttri.emplace(std::move(key), std::move(T)).first->second;
    }

    const Hecke& hecke() const {
        if (!state_->hecke) state_->hecke.emplace(state_->r->graph());
        return *state_->hecke;
    }

    const Laurent& cached_rank(const Word& x, const Word& y) const {
        std::string key = detail::word_key(x) + "|" + detail::word_key(y);
        auto it = state_->ranks.find(key);
        if (it != state_->ranks.end()) return it->second;
        Laurent r = hecke().hom_rank(x, y);
        return state_->ranks.emplace(std::move(key), std::move(r)).first->second;
    }
};

} // namespace soergel
