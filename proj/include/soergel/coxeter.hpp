#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "soergel/common.hpp"

namespace soergel {

using Gen = std::uint8_t; // simple reflection index, 0-based
using Word = std::vector<Gen>;

inline std::string word_str(const Word& w) {
    std::string s;
    for (Gen g : w) {
        if (!s.empty()) s += ".";
        s += "s" + std::to_string(g + 1);
    }
    return s.empty() ? "e" : s;
}

// Simply-laced Coxeter graph: edge means m_st = 3, non-edge m_st = 2.
class CoxeterGraph {
  public:
    CoxeterGraph() = default;
    explicit CoxeterGraph(unsigned rank) : rank_(rank), adj_(rank * rank, 0) {}

    static CoxeterGraph type_a(unsigned rank) {
        CoxeterGraph g(rank);
        for (unsigned i = 0; i + 1 < rank; ++i) g.add_edge(Gen(i), Gen(i + 1));
        return g;
    }
    static CoxeterGraph cycle(unsigned rank) {
        SOERGEL_REQUIRE(rank >= 3, "CoxeterGraph: cycle needs >= 3 vertices");
        CoxeterGraph g = type_a(rank);
        g.add_edge(Gen(rank - 1), Gen(0));
        return g;
    }
    static CoxeterGraph star_d4() {
        // D_4: center s2 (index 1) adjacent to the three others
        CoxeterGraph g(4);
        g.add_edge(1, 0);
        g.add_edge(1, 2);
        g.add_edge(1, 3);
        return g;
    }

    unsigned rank() const { return rank_; }

    void add_edge(Gen s, Gen t) {
        SOERGEL_REQUIRE(s < rank_ && t < rank_, "CoxeterGraph: vertex out of range");
        SOERGEL_REQUIRE(s != t, "CoxeterGraph: no self edges");
        adj_[s * rank_ + t] = adj_[t * rank_ + s] = 1;
    }
    bool adjacent(Gen s, Gen t) const {
        return s != t && adj_[s * rank_ + t] != 0;
    }
    unsigned m(Gen s, Gen t) const {
        if (s == t) return 1;
        return adjacent(s, t) ? 3 : 2;
    }
    std::vector<std::pair<Gen, Gen>> edges() const {
        std::vector<std::pair<Gen, Gen>> es;
        for (Gen s = 0; s < rank_; ++s)
            for (Gen t = s + 1; t < rank_; ++t)
                if (adjacent(s, t)) es.push_back({s, t});
        return es;
    }
    std::vector<Gen> neighbors(Gen s) const {
        std::vector<Gen> ns;
        for (Gen t = 0; t < rank_; ++t)
            if (adjacent(s, t)) ns.push_back(t);
        return ns;
    }
    bool connected() const {
        if (rank_ == 0) return true;
        std::vector<char> seen(rank_, 0);
        std::vector<Gen> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            Gen v = stack.back();
            stack.pop_back();
            for (Gen u : neighbors(v))
                if (!seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    }

  private:
    unsigned rank_ = 0;
    std::vector<char> adj_;
};

// Edge orientation; dir[{s,t}] with s<t stores true when oriented s -> t.
struct Orientation {
    std::vector<std::pair<Gen, Gen>> edges; // each stored (from, to)

    bool has_edge(Gen from, Gen to) const {
        for (auto& [a, b] : edges)
            if (a == from && b == to) return true;
        return false;
    }
    std::string str() const {
        std::string s;
        for (auto& [a, b] : edges) {
            if (!s.empty()) s += ", ";
            s += "s" + std::to_string(a + 1) + "->s" + std::to_string(b + 1);
        }
        return s.empty() ? "(no edges)" : s;
    }
};

// Every path s - m - t of two distinct edges constrains the middle vertex m
// to be neither source nor sink of the pair. Exhaustive over 2^edges.
inline std::vector<Orientation> consistent_orientations(const CoxeterGraph& g) {
    auto es = g.edges();
    std::vector<Orientation> out;
    SOERGEL_REQUIRE(es.size() <= 24, "consistent_orientations: too many edges");
    for (std::uint32_t mask = 0; mask < (1u << es.size()); ++mask) {
        // bit set: oriented lo->hi; clear: hi->lo
        auto points_at = [&](std::size_t i, Gen v) {
            bool fwd = (mask >> i) & 1;
            return (fwd ? es[i].second : es[i].first) == v;
        };
        bool ok = true;
        for (Gen m = 0; m < g.rank() && ok; ++m) {
            std::vector<std::size_t> touching;
            for (std::size_t i = 0; i < es.size(); ++i)
                if (es[i].first == m || es[i].second == m) touching.push_back(i);
            // each pair of edges at m is a 2-path with middle vertex m
            for (std::size_t a = 0; a < touching.size() && ok; ++a)
                for (std::size_t b = a + 1; b < touching.size() && ok; ++b)
                    if (points_at(touching[a], m) == points_at(touching[b], m)) ok = false;
        }
        if (!ok) continue;
        Orientation o;
        for (std::size_t i = 0; i < es.size(); ++i) {
            bool fwd = (mask >> i) & 1;
            o.edges.push_back(fwd ? es[i] : std::pair<Gen, Gen>{es[i].second, es[i].first});
        }
        out.push_back(std::move(o));
    }
    return out;
}

// Permutation utilities for type A words (S_n acting on {0..n-1}).
struct Perm {
    std::vector<unsigned> p; // image of i is p[i]

    static Perm identity(unsigned n) {
        Perm r;
        r.p.resize(n);
        std::iota(r.p.begin(), r.p.end(), 0);
        return r;
    }
    static Perm transposition(unsigned n, unsigned i) {
        Perm r = identity(n);
        std::swap(r.p[i], r.p[i + 1]);
        return r;
    }
    friend Perm operator*(const Perm& a, const Perm& b) {
        // (a*b)(i) = a(b(i))
        Perm r;
        r.p.resize(a.p.size());
        for (std::size_t i = 0; i < b.p.size(); ++i) r.p[i] = a.p[b.p[i]];
        return r;
    }
    friend bool operator==(const Perm& a, const Perm& b) { return a.p == b.p; }
    friend bool operator<(const Perm& a, const Perm& b) { return a.p < b.p; }
    unsigned inversions() const {
        unsigned c = 0;
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j)
                if (p[i] > p[j]) ++c;
        return c;
    }
};

// Word evaluated left to right: first letter acts first.
inline Perm word_to_perm(unsigned n, const Word& w) {
    Perm r = Perm::identity(n);
    for (Gen g : w) {
        SOERGEL_REQUIRE(g + 1u < n, "word_to_perm: generator s", g + 1, " out of range for S_", n);
        r = Perm::transposition(n, g) * r;
    }
    return r;
}

inline bool is_reduced(unsigned n, const Word& w) {
    return word_to_perm(n, w).inversions() == w.size();
}

// All elements of S_n as (permutation, one reduced word), BFS by length.
inline std::vector<std::pair<Perm, Word>> enumerate_sn(unsigned n) {
    std::vector<std::pair<Perm, Word>> out;
    std::set<Perm> seen;
    std::vector<std::pair<Perm, Word>> layer{{Perm::identity(n), {}}};
    seen.insert(Perm::identity(n));
    while (!layer.empty()) {
        for (auto& pw : layer) out.push_back(pw);
        std::vector<std::pair<Perm, Word>> next;
        for (auto& [p, w] : layer) {
            for (Gen g = 0; g + 1u < n; ++g) {
                Perm q = Perm::transposition(n, g) * p;
                if (q.inversions() == w.size() + 1 && seen.insert(q).second) {
                    Word w2 = w;
                    w2.push_back(g);
                    next.push_back({q, w2});
                }
            }
        }
        layer = std::move(next);
    }
    return out;
}

} // namespace soergel
