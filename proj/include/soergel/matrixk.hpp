#pragma once

#include <optional>
#include <vector>

#include "soergel/scalar.hpp"

namespace soergel {

template <class K>
struct DenseMat {
    unsigned rows = 0, cols = 0;
    std::vector<K> a;

    DenseMat() = default;
    DenseMat(unsigned r, unsigned c, K fill) : rows(r), cols(c), a(std::size_t(r) * c, fill) {}

    K& at(unsigned i, unsigned j) { return a[std::size_t(i) * cols + j]; }
    const K& at(unsigned i, unsigned j) const { return a[std::size_t(i) * cols + j]; }

    static DenseMat identity(unsigned n, RingCtx<K> ctx) {
        DenseMat m(n, n, ctx.zero());
        for (unsigned i = 0; i < n; ++i) m.at(i, i) = ctx.one();
        return m;
    }

    friend DenseMat operator*(const DenseMat& x, const DenseMat& y) {
        SOERGEL_REQUIRE(x.cols == y.rows, "DenseMat: size mismatch");
        DenseMat r(x.rows, y.cols, RingTraits<K>::zero());
        for (unsigned i = 0; i < x.rows; ++i)
            for (unsigned k = 0; k < x.cols; ++k) {
                const K& v = x.at(i, k);
                if (RingTraits<K>::is_zero(v)) continue;
                for (unsigned j = 0; j < y.cols; ++j) r.at(i, j) = r.at(i, j) + v * y.at(k, j);
            }
        return r;
    }
    friend bool operator==(const DenseMat& x, const DenseMat& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
};

// Row reduction over a field; returns pivot column per row rank. K must have
// invertible nonzero elements (Rat or Fp).
template <class K>
std::vector<unsigned> rref_in_place(DenseMat<K>& m) {
    std::vector<unsigned> pivots;
    unsigned r = 0;
    for (unsigned c = 0; c < m.cols && r < m.rows; ++c) {
        unsigned pr = r;
        while (pr < m.rows && RingTraits<K>::is_zero(m.at(pr, c))) ++pr;
        if (pr == m.rows) continue;
        for (unsigned j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(pr, j));
        K inv = RingTraits<K>::inverse(m.at(r, c));
        for (unsigned j = 0; j < m.cols; ++j) m.at(r, j) = m.at(r, j) * inv;
        for (unsigned i = 0; i < m.rows; ++i) {
            if (i == r || RingTraits<K>::is_zero(m.at(i, c))) continue;
            K f = m.at(i, c);
            for (unsigned j = 0; j < m.cols; ++j) m.at(i, j) = m.at(i, j) - f * m.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class K>
unsigned mat_rank(DenseMat<K> m) {
    return static_cast<unsigned>(rref_in_place(m).size());
}

// Basis of the right kernel {v : Mv = 0} over a field.
template <class K>
std::vector<std::vector<K>> kernel_basis(DenseMat<K> m, RingCtx<K> ctx) {
    auto pivots = rref_in_place(m);
    std::vector<char> is_pivot(m.cols, 0);
    for (unsigned c : pivots) is_pivot[c] = 1;
    std::vector<std::vector<K>> basis;
    for (unsigned fc = 0; fc < m.cols; ++fc) {
        if (is_pivot[fc]) continue;
        std::vector<K> v(m.cols, ctx.zero());
        v[fc] = ctx.one();
        for (unsigned r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m.at(r, fc);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Solves Mx = b over a field; empty when inconsistent.
template <class K>
std::optional<std::vector<K>> solve_linear(DenseMat<K> m, std::vector<K> b, RingCtx<K> ctx) {
    SOERGEL_REQUIRE(b.size() == m.rows, "solve_linear: rhs size mismatch");
    DenseMat<K> aug(m.rows, m.cols + 1, ctx.zero());
    for (unsigned i = 0; i < m.rows; ++i) {
        for (unsigned j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols) = b[i];
    }
    auto pivots = rref_in_place(aug);
    if (!pivots.empty() && pivots.back() == m.cols) return std::nullopt;
    std::vector<K> x(m.cols, ctx.zero());
    for (unsigned r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(r, m.cols);
    return x;
}

// Column-style Hermite reduction: do the given integer vectors span Z^n?
inline bool spans_integer_lattice(std::vector<std::vector<Int>> vecs, unsigned n) {
    // Gaussian elimination with gcd steps, reducing to column echelon form
    std::vector<std::vector<Int>> cols = std::move(vecs);
    for (auto& c : cols) SOERGEL_REQUIRE(c.size() == n, "spans_integer_lattice: vector size mismatch");
    Int det = 1;
    for (unsigned r = 0; r < n; ++r) {
        // combine columns until at most one has a nonzero entry in row r
        std::size_t lead = cols.size();
        for (;;) {
            lead = cols.size();
            for (std::size_t j = 0; j < cols.size(); ++j) {
                if (cols[j][r] == 0) continue;
                if (lead == cols.size() ||
                    boost::multiprecision::abs(cols[j][r]) < boost::multiprecision::abs(cols[lead][r]))
                    lead = j;
            }
            if (lead == cols.size()) break;
            bool other = false;
            for (std::size_t j = 0; j < cols.size(); ++j) {
                if (j == lead || cols[j][r] == 0) continue;
                other = true;
                Int q = cols[j][r] / cols[lead][r];
                for (unsigned i = 0; i < n; ++i) cols[j][i] -= q * cols[lead][i];
            }
            if (!other) break;
        }
        if (lead == cols.size()) return false; // row unreachable
        det *= cols[lead][r];
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(lead));
    }
    return boost::multiprecision::abs(det) == 1;
}

} // namespace soergel
