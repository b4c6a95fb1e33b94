#pragma once

// Formal diagram terms for the diagrammatic category: words of thin and
// thick strands, horizontal slices of generators, scalar-linear sums, and
// the degree +2 derivation acting through the Leibniz rule. Equality of
// terms is structural; semantic equality is decided by the evaluator.

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "soergel/diffdata.hpp"

namespace soergel {

// one strand label: thin B_s (lo == hi) or thick B_{s,t} (unordered pair)
struct Strand {
    Gen lo = 0, hi = 0;

    static Strand thin(Gen s) { return {s, s}; }
    static Strand thick(Gen a, Gen b) {
        SOERGEL_REQUIRE(a != b, "Strand: thick label needs two distinct colors");
        return {std::min(a, b), std::max(a, b)};
    }
    bool is_thick() const { return lo != hi; }

    friend bool operator==(const Strand&, const Strand&) = default;
    friend auto operator<=>(const Strand&, const Strand&) = default;

    std::string str() const {
        if (!is_thick()) return std::to_string(lo);
        return detail::concat("{", int(lo), ",", int(hi), "}");
    }
};

using ObjWord = std::vector<Strand>;

inline std::string obj_str(const ObjWord& w) {
    std::string s;
    for (const auto& x : w) {
        if (!s.empty()) s += ' ';
        s += x.str();
    }
    return s;
}

enum class DgKind : std::uint8_t {
    identity,
    startdot,
    enddot,
    split,
    merge,
    cross,
    six,
    box,
    thick_split,
    thick_merge,
    ttri_dr,
    ttri_dl,
    ttri_ur,
    ttri_ul,
};

template <class K>
struct DGen {
    DgKind kind = DgKind::identity;
    Gen s = 0, t = 0, c = 0; // colors; c is the attach color of a thick trivalent
    Strand strand{};         // identity payload
    Poly<K> f;               // box payload

    bool is_identity() const { return kind == DgKind::identity; }
    bool is_box() const { return kind == DgKind::box; }

    ObjWord src() const {
        switch (kind) {
            case DgKind::identity: return {strand};
            case DgKind::startdot: return {};
            case DgKind::enddot: return {Strand::thin(s)};
            case DgKind::split: return {Strand::thin(s)};
            case DgKind::merge: return {Strand::thin(s), Strand::thin(s)};
            case DgKind::cross: return {Strand::thin(s), Strand::thin(t)};
            case DgKind::six: return {Strand::thin(s), Strand::thin(t), Strand::thin(s)};
            case DgKind::box: return {};
            case DgKind::thick_split: return {Strand::thick(s, t)};
            case DgKind::thick_merge: return {Strand::thin(s), Strand::thin(t), Strand::thin(s)};
            case DgKind::ttri_dr: return {Strand::thick(s, t), Strand::thin(c)};
            case DgKind::ttri_dl: return {Strand::thin(c), Strand::thick(s, t)};
            case DgKind::ttri_ur: return {Strand::thick(s, t)};
            case DgKind::ttri_ul: return {Strand::thick(s, t)};
        }
        return {};
    }
    ObjWord tgt() const {
        switch (kind) {
            case DgKind::identity: return {strand};
            case DgKind::startdot: return {Strand::thin(s)};
            case DgKind::enddot: return {};
            case DgKind::split: return {Strand::thin(s), Strand::thin(s)};
            case DgKind::merge: return {Strand::thin(s)};
            case DgKind::cross: return {Strand::thin(t), Strand::thin(s)};
            case DgKind::six: return {Strand::thin(t), Strand::thin(s), Strand::thin(t)};
            case DgKind::box: return {};
            case DgKind::thick_split: return {Strand::thin(s), Strand::thin(t), Strand::thin(s)};
            case DgKind::thick_merge: return {Strand::thick(s, t)};
            case DgKind::ttri_dr: return {Strand::thick(s, t)};
            case DgKind::ttri_dl: return {Strand::thick(s, t)};
            case DgKind::ttri_ur: return {Strand::thick(s, t), Strand::thin(c)};
            case DgKind::ttri_ul: return {Strand::thin(c), Strand::thick(s, t)};
        }
        return {};
    }

    int degree() const {
        switch (kind) {
            case DgKind::startdot:
            case DgKind::enddot: return 1;
            case DgKind::split:
            case DgKind::merge:
            case DgKind::ttri_dr:
            case DgKind::ttri_dl:
            case DgKind::ttri_ur:
            case DgKind::ttri_ul: return -1;
            case DgKind::box: {
                if (f.is_zero()) return 0;
                SOERGEL_REQUIRE(f.is_homogeneous(), "box degree: content not homogeneous: ",
                                f.str());
                return 2 * int(*f.total_degree());
            }
            default: return 0;
        }
    }

    std::string key() const {
        switch (kind) {
            case DgKind::identity: return detail::concat("id[", strand.str(), "]");
            case DgKind::startdot: return detail::concat("startdot(", int(s), ")");
            case DgKind::enddot: return detail::concat("enddot(", int(s), ")");
            case DgKind::split: return detail::concat("split(", int(s), ")");
            case DgKind::merge: return detail::concat("merge(", int(s), ")");
            case DgKind::cross: return detail::concat("cross(", int(s), ",", int(t), ")");
            case DgKind::six: return detail::concat("phi(", int(s), ",", int(t), ")");
            case DgKind::box: return detail::concat("poly[", f.str(), "]");
            case DgKind::thick_split:
                return detail::concat("thicksplit(", int(s), ",", int(t), ")");
            case DgKind::thick_merge:
                return detail::concat("thickmerge(", int(s), ",", int(t), ")");
            case DgKind::ttri_dr:
                return detail::concat("ttridr(", int(s), ",", int(t), ",", int(c), ")");
            case DgKind::ttri_dl:
                return detail::concat("ttridl(", int(s), ",", int(t), ",", int(c), ")");
            case DgKind::ttri_ur:
                return detail::concat("ttriur(", int(s), ",", int(t), ",", int(c), ")");
            case DgKind::ttri_ul:
                return detail::concat("ttriul(", int(s), ",", int(t), ",", int(c), ")");
        }
        return "?";
    }
};

template <class K>
struct Slice {
    std::vector<DGen<K>> gens;

    ObjWord src() const {
        ObjWord w;
        for (const auto& g : gens) {
            auto v = g.src();
            w.insert(w.end(), v.begin(), v.end());
        }
        return w;
    }
    ObjWord tgt() const {
        ObjWord w;
        for (const auto& g : gens) {
            auto v = g.tgt();
            w.insert(w.end(), v.begin(), v.end());
        }
        return w;
    }
    int degree() const {
        int d = 0;
        for (const auto& g : gens) d += g.degree();
        return d;
    }
    // only identities and boxes: preserves its word, boxes slide freely
    bool sliding() const {
        return std::all_of(gens.begin(), gens.end(),
                           [](const DGen<K>& g) { return g.is_identity() || g.is_box(); });
    }
    bool all_identity() const {
        return std::all_of(gens.begin(), gens.end(),
                           [](const DGen<K>& g) { return g.is_identity(); });
    }
};

template <class K>
struct DiagramTerm {
    ObjWord bottom;
    std::vector<Slice<K>> slices;

    ObjWord top() const { return slices.empty() ? bottom : slices.back().tgt(); }
    int degree() const {
        int d = 0;
        for (const auto& s : slices) d += s.degree();
        return d;
    }
    void validate() const {
        ObjWord w = bottom;
        for (const auto& s : slices) {
            SOERGEL_REQUIRE(s.src() == w, "DiagramTerm: slice source ", obj_str(s.src()),
                            " does not continue ", obj_str(w));
            w = s.tgt();
        }
    }
    std::string key() const {
        std::string k = obj_str(bottom);
        for (const auto& s : slices) {
            k += " ; ";
            bool first = true;
            for (const auto& g : s.gens) {
                if (!first) k += " | ";
                first = false;
                k += g.key();
            }
        }
        return k;
    }
};

namespace detail {

// Canonical decomposition of a term: box-free generator rows in the lowest
// slicing isotopy permits, plus box contents floated down to the lowest
// level their face reaches; boxes meeting at one spot multiply. Level i
// sits below genrows[i].
template <class K>
struct CanonicalParts {
    ObjWord bottom;
    std::vector<Slice<K>> genrows;
    std::map<std::pair<unsigned, unsigned>, Poly<K>> deposits; // (level, gap)
};

// A gap at the top of a generator row either lies between two generator
// spans (an open channel: the face continues below, through the matching
// source gap) or inside one span (blocked: the face is bounded there).
// Empty target spans make several nominal boundaries coincide; the leftmost
// match keeps the choice canonical.
template <class K>
std::optional<unsigned> channel_down(const Slice<K>& row, unsigned gap) {
    unsigned tpre = 0, spre = 0;
    for (const auto& g : row.gens) {
        if (gap == tpre) return spre;
        unsigned tspan = unsigned(g.tgt().size());
        if (gap < tpre + tspan) return std::nullopt;
        tpre += tspan;
        spre += unsigned(g.src().size());
    }
    return gap == tpre ? std::optional<unsigned>(spre) : std::nullopt;
}

// Can the strands [a, b) at the top of `row` be consumed below it instead?
// Open iff only identity atoms cover them and nothing else sits strictly
// inside; the matching source start position comes back.
template <class K>
std::optional<unsigned> pass_span(const Slice<K>& row, unsigned a, unsigned b) {
    unsigned tpre = 0, spre = 0;
    std::optional<unsigned> a2;
    for (const auto& g : row.gens) {
        unsigned t = unsigned(g.tgt().size());
        if (t == 0) {
            if (tpre > a && tpre < b) return std::nullopt;
        } else if (tpre + t > a && tpre < b) {
            if (!g.is_identity()) return std::nullopt;
            if (tpre == a) a2 = spre;
        }
        tpre += t;
        spre += unsigned(g.src().size());
    }
    return a2;
}

// Greedy placement machine: reading the input slices bottom to top, every
// generator descends to the lowest row its input strands, the faces it
// would cross, and the resting boxes allow. The result is independent of
// the slicing the term arrived in.
template <class K>
class Canonicalizer {
  public:
    explicit Canonicalizer(CanonicalParts<K>& parts) : p_(parts) {}

    void run(const DiagramTerm<K>& t) {
        t.validate();
        p_.bottom = t.bottom;
        words_.push_back(t.bottom);
        for (const auto& s : t.slices) {
            long delta = 0; // width drift caused by atoms already placed in this row
            unsigned spre = 0;
            for (const auto& g : s.gens) {
                unsigned ssz = unsigned(g.src().size());
                unsigned pos = unsigned(long(spre) + delta);
                if (g.is_box()) {
                    place_box(pos, g.f);
                } else if (!g.is_identity()) {
                    if (ssz == 0)
                        place_nullary(pos, g);
                    else
                        place_spanning(pos, ssz, g);
                    delta += long(g.tgt().size()) - long(ssz);
                }
                spre += ssz;
            }
        }
        sort_rows();
    }

  private:
    unsigned nrows() const { return unsigned(p_.genrows.size()); }

    // channel_down plus the matched atom index, for seat disambiguation
    // when zero width atoms share a numeric gap
    static std::optional<std::pair<unsigned, std::size_t>> channel_step(const Slice<K>& row,
                                                                        unsigned gap) {
        unsigned tpre = 0, spre = 0;
        for (std::size_t i = 0; i < row.gens.size(); ++i) {
            if (gap == tpre) return {{spre, i}};
            unsigned tspan = unsigned(row.gens[i].tgt().size());
            if (gap < tpre + tspan) return std::nullopt;
            tpre += tspan;
            spre += unsigned(row.gens[i].src().size());
        }
        if (gap == tpre) return {{spre, row.gens.size()}};
        return std::nullopt;
    }

    bool deposit_inside(unsigned level, unsigned a, unsigned b) const {
        auto it = p_.deposits.lower_bound({level, a + 1});
        return it != p_.deposits.end() && it->first.first == level && it->first.second < b;
    }

    void add_deposit(unsigned level, unsigned gap, const Poly<K>& f) {
        auto [it, fresh] = p_.deposits.try_emplace({level, gap}, f);
        if (!fresh) it->second *= f;
    }

    void place_box(unsigned gap, const Poly<K>& f) {
        unsigned level = nrows();
        while (level > 0) {
            auto below = channel_down(p_.genrows[level - 1], gap);
            if (!below) break;
            gap = *below;
            --level;
        }
        add_deposit(level, gap, f);
    }

    void append_identity_row() {
        Slice<K> row;
        for (const auto& x : words_.back())
            row.gens.push_back(DGen<K>{DgKind::identity, 0, 0, 0, x, {}});
        p_.genrows.push_back(std::move(row));
        words_.push_back(words_.back());
    }

    void remap_boundary(unsigned j, unsigned from, long shift) {
        std::map<std::pair<unsigned, unsigned>, Poly<K>> moved;
        for (auto& [pos, f] : p_.deposits) {
            auto np = pos;
            if (np.first == j && np.second >= from)
                np.second = unsigned(long(np.second) + shift);
            auto [it, fresh] = moved.try_emplace(np, std::move(f));
            if (!fresh) it->second *= f; // faces merged over a dot
        }
        p_.deposits = std::move(moved);
    }

    // startdot: descends through open channels like a box, seats at the
    // matched boundary of the row it rests in, and threads its strand back
    // up along the recorded path
    void place_nullary(unsigned gap, const DGen<K>& g) {
        unsigned level = nrows();
        unsigned gp = gap;
        std::vector<std::size_t> path; // matched indices, topmost row first
        while (level > 0) {
            auto hit = channel_step(p_.genrows[level - 1], gp);
            if (!hit) break;
            gp = hit->first;
            path.push_back(hit->second);
            --level;
        }
        std::size_t idx;
        if (level == nrows()) {
            append_identity_row();
            idx = gap;
            path.clear();
        } else {
            idx = path.back();
        }
        auto& row = p_.genrows[level];
        unsigned tpos = 0;
        for (std::size_t i = 0; i < idx; ++i)
            tpos += unsigned(row.gens[i].tgt().size());
        row.gens.insert(row.gens.begin() + long(idx), g);
        // thread upward: words gain the strand, rows gain one identity at
        // the index the descent matched
        for (unsigned j = level + 1; j <= nrows(); ++j) {
            ObjWord& w = words_[j];
            w.insert(w.begin() + tpos, g.tgt().front());
            remap_boundary(j, tpos + 1, 1);
            if (j == nrows()) break;
            auto& up = p_.genrows[j];
            std::size_t k = path[nrows() - 1 - j];
            unsigned tp = 0;
            for (std::size_t i = 0; i < k; ++i)
                tp += unsigned(up.gens[i].tgt().size());
            up.gens.insert(up.gens.begin() + long(k),
                           DGen<K>{DgKind::identity, 0, 0, 0, g.tgt().front(), {}});
            tpos = tp;
        }
    }

    void place_spanning(unsigned pos, unsigned ssz, const DGen<K>& g) {
        unsigned cur = nrows();
        unsigned a = pos, b = pos + ssz;
        unsigned above = a; // span start one boundary up, where the targets sit
        while (cur > 0) {
            if (deposit_inside(cur, a, b)) break;
            auto a2 = pass_span(p_.genrows[cur - 1], a, b);
            if (!a2) break;
            above = a;
            --cur;
            a = *a2;
            b = a + ssz;
        }
        if (cur == nrows()) {
            append_identity_row();
            above = a;
        }
        auto& row = p_.genrows[cur];
        unsigned tpre = 0;
        std::size_t i0 = 0;
        for (; i0 < row.gens.size(); ++i0) {
            if (tpre == above && row.gens[i0].tgt().size() > 0) break;
            tpre += unsigned(row.gens[i0].tgt().size());
        }
        SOERGEL_REQUIRE(tpre == above, "canonical placement lost its strands");
        row.gens.erase(row.gens.begin() + long(i0), row.gens.begin() + long(i0) + ssz);
        row.gens.insert(row.gens.begin() + long(i0), g);
        // splice the boundary words and threaded identities above
        const ObjWord gt = g.tgt();
        unsigned newsz = unsigned(gt.size());
        unsigned a2 = above, b2 = above + ssz;
        for (unsigned j = cur + 1; j <= nrows(); ++j) {
            ObjWord& w = words_[j];
            w.erase(w.begin() + a2, w.begin() + b2);
            w.insert(w.begin() + a2, gt.begin(), gt.end());
            remap_boundary(j, std::max(b2, a2 + 1), long(newsz) - long(ssz));
            if (j == nrows()) break;
            auto& up = p_.genrows[j];
            unsigned spre2 = 0, tpre2 = 0;
            std::size_t k = 0;
            for (; k < up.gens.size(); ++k) {
                if (spre2 == a2 && up.gens[k].src().size() > 0) break;
                spre2 += unsigned(up.gens[k].src().size());
                tpre2 += unsigned(up.gens[k].tgt().size());
            }
            SOERGEL_REQUIRE(spre2 == a2, "canonical threading lost its strands");
            up.gens.erase(up.gens.begin() + long(k), up.gens.begin() + long(k) + ssz);
            std::vector<DGen<K>> ids;
            for (const auto& x : gt)
                ids.push_back(DGen<K>{DgKind::identity, 0, 0, 0, x, {}});
            up.gens.insert(up.gens.begin() + long(k), ids.begin(), ids.end());
            a2 = tpre2;
            b2 = a2 + ssz;
        }
    }

    // canonical order inside a row: neighbours may swap exactly when both
    // share no strand boundary on either side, which happens when each pair
    // of sides has an empty span; sort those by key
    void sort_rows() {
        for (auto& row : p_.genrows) {
            bool moved = true;
            while (moved) {
                moved = false;
                for (std::size_t i = 0; i + 1 < row.gens.size(); ++i) {
                    DGen<K>& x = row.gens[i];
                    DGen<K>& y = row.gens[i + 1];
                    bool legal = (x.src().empty() || y.src().empty()) &&
                                 (x.tgt().empty() || y.tgt().empty());
                    if (legal && y.key() < x.key()) {
                        std::swap(x, y);
                        moved = true;
                    }
                }
            }
        }
    }

    CanonicalParts<K>& p_;
    std::vector<ObjWord> words_;
};

template <class K>
void canonicalize(const DiagramTerm<K>& t, CanonicalParts<K>& parts) {
    Canonicalizer<K>(parts).run(t);
}

} // namespace detail

template <class K>
class MorphismSum {
  public:
    MorphismSum() = default;
    MorphismSum(ObjWord src, ObjWord tgt, RingCtx<K> ctx)
        : src_(std::move(src)), tgt_(std::move(tgt)), ctx_(ctx) {}

    static MorphismSum single(DiagramTerm<K> t, const K& coeff, RingCtx<K> ctx) {
        MorphismSum m(t.bottom, t.top(), ctx);
        m.add_term(std::move(t), coeff);
        return m;
    }

    // canonicalize, then expand every deposit into its monomials so that
    // scalar content lives in the coefficient and boxes stay monic
    void add_term(const DiagramTerm<K>& t, const K& coeff) {
        SOERGEL_REQUIRE(t.bottom == src_ && t.top() == tgt_,
                        "MorphismSum: term boundary mismatch");
        if (RingTraits<K>::is_zero(coeff)) return;
        detail::CanonicalParts<K> parts;
        detail::canonicalize(t, parts);

        std::vector<std::pair<std::pair<unsigned, unsigned>, const Poly<K>*>> boxes;
        for (const auto& [pos, f] : parts.deposits) {
            if (f.is_zero()) return;
            boxes.emplace_back(pos, &f);
        }
        std::vector<ObjWord> words;
        words.push_back(parts.bottom);
        for (const auto& row : parts.genrows) words.push_back(row.tgt());

        std::vector<typename Poly<K>::Terms::const_iterator> pick;
        for (const auto& [pos, f] : boxes) pick.push_back(f->terms().begin());

        while (true) {
            K c = coeff;
            DiagramTerm<K> nt;
            nt.bottom = parts.bottom;
            std::size_t bi = 0;
            for (unsigned level = 0; level <= unsigned(parts.genrows.size()); ++level) {
                Slice<K> row;
                bool any = false;
                const ObjWord& w = words[level];
                for (unsigned gap = 0; gap <= w.size(); ++gap) {
                    if (bi < boxes.size() && boxes[bi].first.first == level &&
                        boxes[bi].first.second == gap) {
                        c = c * pick[bi]->second;
                        Poly<K> mono;
                        mono.add_term(pick[bi]->first, ctx_.one());
                        row.gens.push_back(
                            DGen<K>{DgKind::box, 0, 0, 0, Strand{}, std::move(mono)});
                        any = true;
                        ++bi;
                    }
                    if (gap < w.size())
                        row.gens.push_back(DGen<K>{DgKind::identity, 0, 0, 0, w[gap], {}});
                }
                if (any) nt.slices.push_back(std::move(row));
                if (level < parts.genrows.size()) nt.slices.push_back(parts.genrows[level]);
            }
            if (!RingTraits<K>::is_zero(c)) {
                std::string k = nt.key();
                auto [it, fresh] = terms_.try_emplace(std::move(k), std::move(nt), c);
                if (!fresh) {
                    it->second.second = it->second.second + c;
                    if (RingTraits<K>::is_zero(it->second.second)) terms_.erase(it);
                }
            }
            std::size_t adv = 0;
            for (; adv < pick.size(); ++adv) {
                ++pick[adv];
                if (pick[adv] != boxes[adv].second->terms().end()) break;
                pick[adv] = boxes[adv].second->terms().begin();
            }
            if (adv == pick.size()) break;
        }
    }

    const ObjWord& src() const { return src_; }
    const ObjWord& tgt() const { return tgt_; }
    RingCtx<K> ctx() const { return ctx_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::map<std::string, std::pair<DiagramTerm<K>, K>>& terms() const { return terms_; }

    int degree() const {
        SOERGEL_REQUIRE(!terms_.empty(), "degree of the zero morphism");
        int d = terms_.begin()->second.first.degree();
        for (const auto& [k, tc] : terms_)
            SOERGEL_REQUIRE(tc.first.degree() == d, "degree of an inhomogeneous sum");
        return d;
    }

    MorphismSum scaled(const K& c) const {
        MorphismSum r(src_, tgt_, ctx_);
        if (RingTraits<K>::is_zero(c)) return r;
        for (const auto& [k, tc] : terms_) r.terms_.emplace(k, std::pair{tc.first, tc.second * c});
        return r;
    }

    MorphismSum& operator+=(const MorphismSum& o) {
        SOERGEL_REQUIRE(src_ == o.src_ && tgt_ == o.tgt_, "MorphismSum: sum boundary mismatch");
        for (const auto& [k, tc] : o.terms_) {
            auto [it, fresh] = terms_.try_emplace(k, tc);
            if (!fresh) {
                it->second.second = it->second.second + tc.second;
                if (RingTraits<K>::is_zero(it->second.second)) terms_.erase(it);
            }
        }
        return *this;
    }
    friend MorphismSum operator+(MorphismSum a, const MorphismSum& b) { return a += b; }
    friend MorphismSum operator-(const MorphismSum& a, const MorphismSum& b) {
        MorphismSum r = a;
        r += b.scaled(b.ctx_.from_int(-1));
        return r;
    }

    friend bool operator==(const MorphismSum& a, const MorphismSum& b) {
        if (a.src_ != b.src_ || a.tgt_ != b.tgt_) return false;
        if (a.terms_.size() != b.terms_.size()) return false;
        auto ia = a.terms_.begin();
        auto ib = b.terms_.begin();
        for (; ia != a.terms_.end(); ++ia, ++ib)
            if (ia->first != ib->first || !(ia->second.second == ib->second.second)) return false;
        return true;
    }
    friend bool operator!=(const MorphismSum& a, const MorphismSum& b) { return !(a == b); }

  private:
    ObjWord src_, tgt_;
    RingCtx<K> ctx_;
    // canonical key -> (normalized term, coefficient)
    std::map<std::string, std::pair<DiagramTerm<K>, K>> terms_;
};

namespace detail {

template <class K>
Slice<K> identity_slice(const ObjWord& w) {
    Slice<K> s;
    for (const auto& x : w) s.gens.push_back(DGen<K>{DgKind::identity, 0, 0, 0, x, {}});
    return s;
}

} // namespace detail

// vertical composition f after g
template <class K>
MorphismSum<K> compose_v(const MorphismSum<K>& f, const MorphismSum<K>& g) {
    SOERGEL_REQUIRE(g.tgt() == f.src(), "compose_v: target ", obj_str(g.tgt()),
                    " does not match source ", obj_str(f.src()));
    MorphismSum<K> r(g.src(), f.tgt(), f.ctx());
    for (const auto& [kg, tg] : g.terms())
        for (const auto& [kf, tf] : f.terms()) {
            DiagramTerm<K> t;
            t.bottom = tg.first.bottom;
            t.slices = tg.first.slices;
            t.slices.insert(t.slices.end(), tf.first.slices.begin(), tf.first.slices.end());
            r.add_term(std::move(t), tg.second * tf.second);
        }
    return r;
}

// horizontal composition, f on the left; the shorter side is padded with
// identity rows at the top
template <class K>
MorphismSum<K> compose_h(const MorphismSum<K>& f, const MorphismSum<K>& g) {
    ObjWord src = f.src(), tgt = f.tgt();
    src.insert(src.end(), g.src().begin(), g.src().end());
    tgt.insert(tgt.end(), g.tgt().begin(), g.tgt().end());
    MorphismSum<K> r(src, tgt, f.ctx());
    for (const auto& [kf, tf] : f.terms())
        for (const auto& [kg, tg] : g.terms()) {
            const auto& a = tf.first;
            const auto& b = tg.first;
            std::size_t h = std::max(a.slices.size(), b.slices.size());
            DiagramTerm<K> t;
            t.bottom = a.bottom;
            t.bottom.insert(t.bottom.end(), b.bottom.begin(), b.bottom.end());
            for (std::size_t i = 0; i < h; ++i) {
                Slice<K> row = i < a.slices.size() ? a.slices[i]
                                                   : detail::identity_slice<K>(a.top());
                Slice<K> rb = i < b.slices.size() ? b.slices[i]
                                                  : detail::identity_slice<K>(b.top());
                row.gens.insert(row.gens.end(), rb.gens.begin(), rb.gens.end());
                t.slices.push_back(std::move(row));
            }
            r.add_term(std::move(t), tf.second * tg.second);
        }
    return r;
}

namespace detail {

template <class K>
DGen<K> hflip_gen(const DGen<K>& g) {
    DGen<K> r = g;
    switch (g.kind) {
        case DgKind::cross: std::swap(r.s, r.t); break;
        case DgKind::ttri_dr: r.kind = DgKind::ttri_dl; break;
        case DgKind::ttri_dl: r.kind = DgKind::ttri_dr; break;
        case DgKind::ttri_ur: r.kind = DgKind::ttri_ul; break;
        case DgKind::ttri_ul: r.kind = DgKind::ttri_ur; break;
        default: break;
    }
    return r;
}

template <class K>
DGen<K> vflip_gen(const DGen<K>& g) {
    DGen<K> r = g;
    switch (g.kind) {
        case DgKind::startdot: r.kind = DgKind::enddot; break;
        case DgKind::enddot: r.kind = DgKind::startdot; break;
        case DgKind::split: r.kind = DgKind::merge; break;
        case DgKind::merge: r.kind = DgKind::split; break;
        case DgKind::cross: std::swap(r.s, r.t); break;
        case DgKind::six: std::swap(r.s, r.t); break;
        case DgKind::thick_split: r.kind = DgKind::thick_merge; break;
        case DgKind::thick_merge: r.kind = DgKind::thick_split; break;
        case DgKind::ttri_dr: r.kind = DgKind::ttri_ur; break;
        case DgKind::ttri_ur: r.kind = DgKind::ttri_dr; break;
        case DgKind::ttri_dl: r.kind = DgKind::ttri_ul; break;
        case DgKind::ttri_ul: r.kind = DgKind::ttri_dl; break;
        default: break;
    }
    return r;
}

} // namespace detail

template <class K>
MorphismSum<K> hflip(const MorphismSum<K>& m) {
    ObjWord src = m.src(), tgt = m.tgt();
    std::reverse(src.begin(), src.end());
    std::reverse(tgt.begin(), tgt.end());
    MorphismSum<K> r(src, tgt, m.ctx());
    for (const auto& [k, tc] : m.terms()) {
        DiagramTerm<K> t;
        t.bottom = tc.first.bottom;
        std::reverse(t.bottom.begin(), t.bottom.end());
        for (const auto& s : tc.first.slices) {
            Slice<K> row;
            for (auto it = s.gens.rbegin(); it != s.gens.rend(); ++it)
                row.gens.push_back(detail::hflip_gen(*it));
            t.slices.push_back(std::move(row));
        }
        r.add_term(std::move(t), tc.second);
    }
    return r;
}

template <class K>
MorphismSum<K> vflip(const MorphismSum<K>& m) {
    MorphismSum<K> r(m.tgt(), m.src(), m.ctx());
    for (const auto& [k, tc] : m.terms()) {
        DiagramTerm<K> t;
        t.bottom = tc.first.top();
        for (auto it = tc.first.slices.rbegin(); it != tc.first.slices.rend(); ++it) {
            Slice<K> row;
            for (const auto& g : it->gens) row.gens.push_back(detail::vflip_gen(g));
            t.slices.push_back(std::move(row));
        }
        r.add_term(std::move(t), tc.second);
    }
    return r;
}

template <class K>
MorphismSum<K> rot180(const MorphismSum<K>& m) {
    return hflip(vflip(m));
}

// diagram factory bound to a Coxeter graph; validates colors and adjacency
template <class K>
class Diagrams {
  public:
    Diagrams(const CoxeterGraph& g, RingCtx<K> ctx) : g_(g), ctx_(ctx) {}

    ObjWord w(std::initializer_list<Gen> colors) const {
        ObjWord r;
        for (Gen s : colors) {
            check_color(s);
            r.push_back(Strand::thin(s));
        }
        return r;
    }

    MorphismSum<K> identity(const ObjWord& word) const {
        DiagramTerm<K> t;
        t.bottom = word;
        return MorphismSum<K>::single(std::move(t), ctx_.one(), ctx_);
    }

    MorphismSum<K> startdot(Gen s) const { return atom(mk(DgKind::startdot, s)); }
    MorphismSum<K> enddot(Gen s) const { return atom(mk(DgKind::enddot, s)); }
    MorphismSum<K> split(Gen s) const { return atom(mk(DgKind::split, s)); }
    MorphismSum<K> merge(Gen s) const { return atom(mk(DgKind::merge, s)); }

    MorphismSum<K> cross(Gen s, Gen u) const {
        check_color(s);
        check_color(u);
        SOERGEL_REQUIRE(s != u && !g_.adjacent(s, u),
                        "cross: colors must be distant, got ", int(s), ",", int(u));
        return atom(mk(DgKind::cross, s, u));
    }

    MorphismSum<K> six_phi(Gen s, Gen t) const {
        check_adjacent(s, t);
        return atom(mk(DgKind::six, s, t));
    }
    MorphismSum<K> six_psi(Gen s, Gen t) const { return six_phi(t, s); }

    MorphismSum<K> polybox(const Poly<K>& f) const {
        return atom(DGen<K>{DgKind::box, 0, 0, 0, Strand{}, f});
    }

    // identity of `word` with `f` boxed into gap `gap`
    MorphismSum<K> box_slice(const ObjWord& word, unsigned gap, const Poly<K>& f) const {
        SOERGEL_REQUIRE(gap <= word.size(), "box_slice: gap ", gap, " outside word of length ",
                        word.size());
        DiagramTerm<K> t;
        t.bottom = word;
        Slice<K> row;
        for (unsigned i = 0; i <= word.size(); ++i) {
            if (i == gap) row.gens.push_back(DGen<K>{DgKind::box, 0, 0, 0, Strand{}, f});
            if (i < word.size())
                row.gens.push_back(DGen<K>{DgKind::identity, 0, 0, 0, word[i], {}});
        }
        t.slices.push_back(std::move(row));
        return MorphismSum<K>::single(std::move(t), ctx_.one(), ctx_);
    }

    // cut strand `pos`: enddot then startdot, identity elsewhere
    MorphismSum<K> brk_at(const ObjWord& word, unsigned pos) const {
        SOERGEL_REQUIRE(pos < word.size() && !word[pos].is_thick(),
                        "brk_at: needs a thin strand inside the word");
        Gen s = word[pos].lo;
        DiagramTerm<K> t;
        t.bottom = word;
        Slice<K> lower, upper;
        for (unsigned i = 0; i < word.size(); ++i) {
            if (i == pos) {
                lower.gens.push_back(DGen<K>{DgKind::enddot, s, 0, 0, Strand{}, {}});
                upper.gens.push_back(DGen<K>{DgKind::startdot, s, 0, 0, Strand{}, {}});
            } else {
                lower.gens.push_back(DGen<K>{DgKind::identity, 0, 0, 0, word[i], {}});
                upper.gens.push_back(DGen<K>{DgKind::identity, 0, 0, 0, word[i], {}});
            }
        }
        t.slices.push_back(std::move(lower));
        t.slices.push_back(std::move(upper));
        return MorphismSum<K>::single(std::move(t), ctx_.one(), ctx_);
    }

    MorphismSum<K> cup(Gen s) const { return compose_v(split(s), startdot(s)); }
    MorphismSum<K> cap(Gen s) const { return compose_v(enddot(s), merge(s)); }
    MorphismSum<K> brk(Gen s) const { return compose_v(startdot(s), enddot(s)); }
    MorphismSum<K> barbell(Gen s) const { return compose_v(enddot(s), startdot(s)); }

    // B_{a,b} -> B_a B_b B_a, outer color first
    MorphismSum<K> thick_split(Gen a, Gen b) const {
        check_adjacent(a, b);
        return atom(mk(DgKind::thick_split, a, b));
    }
    MorphismSum<K> thick_merge(Gen a, Gen b) const {
        check_adjacent(a, b);
        return atom(mk(DgKind::thick_merge, a, b));
    }
    MorphismSum<K> thick_id(Gen a, Gen b) const {
        check_adjacent(a, b);
        return identity({Strand::thick(a, b)});
    }

    MorphismSum<K> ttri_dr(Gen s, Gen t, Gen c) const { return ttri(DgKind::ttri_dr, s, t, c); }
    MorphismSum<K> ttri_dl(Gen s, Gen t, Gen c) const { return ttri(DgKind::ttri_dl, s, t, c); }
    MorphismSum<K> ttri_ur(Gen s, Gen t, Gen c) const { return ttri(DgKind::ttri_ur, s, t, c); }
    MorphismSum<K> ttri_ul(Gen s, Gen t, Gen c) const { return ttri(DgKind::ttri_ul, s, t, c); }

    MorphismSum<K> compose_v(const MorphismSum<K>& f, const MorphismSum<K>& g) const {
        return soergel::compose_v(f, g);
    }
    MorphismSum<K> compose_h(const MorphismSum<K>& f, const MorphismSum<K>& g) const {
        return soergel::compose_h(f, g);
    }

    const CoxeterGraph& graph() const { return g_; }
    RingCtx<K> ctx() const { return ctx_; }

    MorphismSum<K> parse(std::string_view text) const;
    std::string str(const MorphismSum<K>& m) const;

  private:
    void check_color(Gen s) const {
        SOERGEL_REQUIRE(s < g_.rank(), "color ", int(s), " outside rank ", g_.rank());
    }
    void check_adjacent(Gen s, Gen t) const {
        check_color(s);
        check_color(t);
        SOERGEL_REQUIRE(g_.adjacent(s, t), "colors ", int(s), ",", int(t), " are not adjacent");
    }
    static DGen<K> mk(DgKind kind, Gen s, Gen t = 0, Gen c = 0) {
        return DGen<K>{kind, s, t, c, Strand{}, {}};
    }
    MorphismSum<K> atom(DGen<K> g) const {
        if (g.kind != DgKind::box) check_color(g.s);
        if (g.kind == DgKind::cross || g.kind == DgKind::six ||
            g.kind == DgKind::thick_split || g.kind == DgKind::thick_merge)
            check_color(g.t);
        DiagramTerm<K> t;
        t.bottom = g.src();
        t.slices.push_back(Slice<K>{{std::move(g)}});
        return MorphismSum<K>::single(std::move(t), ctx_.one(), ctx_);
    }
    MorphismSum<K> ttri(DgKind kind, Gen s, Gen t, Gen c) const {
        check_adjacent(s, t);
        SOERGEL_REQUIRE(c == s || c == t, "thick trivalent: attach color ", int(c),
                        " must be one of ", int(s), ",", int(t));
        return atom(mk(kind, s, t, c));
    }

    const CoxeterGraph& g_;
    RingCtx<K> ctx_;
};

// ---- the derivation ----

namespace detail {

// image of a single generator under the differential; thick generators
// consult the good-differential verdict (checked by the caller)
template <class K>
MorphismSum<K> gen_image(const PotentialDifferential<K>& pd, const Diagrams<K>& D,
                         const DGen<K>& g, const GoodVerdict<K>* verdict) {
    const RingCtx<K> ctx = D.ctx();
    MorphismSum<K> zero(g.src(), g.tgt(), ctx);
    switch (g.kind) {
        case DgKind::identity: return zero;
        case DgKind::enddot:
            return compose_v(D.box_slice({}, 0, pd.g(g.s)), D.enddot(g.s));
        case DgKind::startdot:
            return compose_v(D.startdot(g.s), D.box_slice({}, 0, pd.gbar(g.s)));
        case DgKind::split:
            return compose_v(D.box_slice(g.tgt(), 1, -pd.g(g.s)), D.split(g.s));
        case DgKind::merge:
            return compose_v(D.merge(g.s), D.box_slice(g.src(), 1, -pd.gbar(g.s)));
        case DgKind::box:
            return D.polybox(pd.ring_differential()(g.f));
        case DgKind::cross: {
            auto X = D.cross(g.s, g.t);
            auto r = compose_v(D.box_slice(g.tgt(), 1, -pd.g(g.t)), X);
            r += compose_v(X, D.box_slice(g.src(), 1, pd.g(g.s)));
            r += compose_v(D.box_slice(g.tgt(), 2, pd.g(g.t) - pd.g(g.s)), X);
            return r;
        }
        case DgKind::six: {
            auto c = six_valent_coeffs(pd, g.s, g.t);
            auto phi = D.six_phi(g.s, g.t);
            ObjWord lo = g.src(), hi = g.tgt();
            MorphismSum<K> r = zero;
            r += compose_v(D.brk_at(hi, 1), phi).scaled(c.A);
            r += compose_v(phi, D.brk_at(lo, 1)).scaled(c.B);
            r += compose_v(D.brk_at(hi, 2), phi).scaled(c.C);
            r += compose_v(phi, D.brk_at(lo, 2)).scaled(c.D);
            if (!c.f.is_zero()) r += compose_v(phi, D.box_slice(lo, 3, c.f));
            return r;
        }
        case DgKind::ttri_dr:
            return compose_v(D.ttri_dr(g.s, g.t, g.c), D.box_slice(g.src(), 1, -pd.gbar(g.c)));
        case DgKind::ttri_dl:
            return compose_v(D.ttri_dl(g.s, g.t, g.c), D.box_slice(g.src(), 1, -pd.gbar(g.c)));
        case DgKind::ttri_ur:
            return compose_v(D.box_slice(g.tgt(), 1, -pd.g(g.c)), D.ttri_ur(g.s, g.t, g.c));
        case DgKind::ttri_ul:
            return compose_v(D.box_slice(g.tgt(), 1, -pd.g(g.c)), D.ttri_ul(g.s, g.t, g.c));
        case DgKind::thick_split: {
            // with edge orientation a -> b the splitter towards the sink
            // word bab acquires a broken middle strand, the other dies
            if (!verdict->orientation.has_value()) return zero;
            if (!verdict->orientation->has_edge(g.t, g.s)) return zero;
            auto sp = D.thick_split(g.s, g.t);
            return compose_v(D.brk_at(g.tgt(), 1), sp).scaled(verdict->kappa);
        }
        case DgKind::thick_merge: {
            if (!verdict->orientation.has_value()) return zero;
            if (!verdict->orientation->has_edge(g.s, g.t)) return zero;
            auto mg = D.thick_merge(g.s, g.t);
            K mk = ctx.from_int(-1) * verdict->kappa;
            return compose_v(mg, D.brk_at(g.src(), 1)).scaled(mk);
        }
    }
    return zero;
}

template <class K>
bool uses_thick(const MorphismSum<K>& m) {
    for (const auto& [k, tc] : m.terms())
        for (const auto& s : tc.first.slices)
            for (const auto& g : s.gens)
                switch (g.kind) {
                    case DgKind::thick_split:
                    case DgKind::thick_merge:
                    case DgKind::ttri_dr:
                    case DgKind::ttri_dl:
                    case DgKind::ttri_ur:
                    case DgKind::ttri_ul: return true;
                    default: break;
                }
    return false;
}

} // namespace detail

template <class K>
MorphismSum<K> derive(const PotentialDifferential<K>& pd, const MorphismSum<K>& m) {
    const Realization<K>& r = pd.realization();
    Diagrams<K> D(r.graph(), r.ctx());
    std::optional<GoodVerdict<K>> verdict;
    if (detail::uses_thick(m)) {
        verdict = check_good(pd);
        SOERGEL_REQUIRE(verdict->good,
                        "thick calculus differential requires a good differential");
    }

    MorphismSum<K> out(m.src(), m.tgt(), m.ctx());
    for (const auto& [key, tc] : m.terms()) {
        const DiagramTerm<K>& t = tc.first;
        for (std::size_t row = 0; row < t.slices.size(); ++row) {
            const Slice<K>& sl = t.slices[row];
            for (std::size_t j = 0; j < sl.gens.size(); ++j) {
                auto img =
                    detail::gen_image(pd, D, sl.gens[j], verdict ? &*verdict : nullptr);
                if (img.is_zero()) continue;
                for (const auto& [ik, itc] : img.terms()) {
                    const DiagramTerm<K>& im = itc.first;
                    std::size_t h = std::max<std::size_t>(im.slices.size(), 1);
                    DiagramTerm<K> nt;
                    nt.bottom = t.bottom;
                    for (std::size_t q = 0; q < row; ++q) nt.slices.push_back(t.slices[q]);
                    for (std::size_t q = 0; q < h; ++q) {
                        Slice<K> z;
                        for (std::size_t i = 0; i < sl.gens.size(); ++i) {
                            if (i == j) {
                                if (q < im.slices.size())
                                    z.gens.insert(z.gens.end(), im.slices[q].gens.begin(),
                                                  im.slices[q].gens.end());
                                continue;
                            }
                            if (q == 0) {
                                z.gens.push_back(sl.gens[i]);
                            } else {
                                for (const auto& x : sl.gens[i].tgt())
                                    z.gens.push_back(
                                        DGen<K>{DgKind::identity, 0, 0, 0, x, {}});
                            }
                        }
                        nt.slices.push_back(std::move(z));
                    }
                    for (std::size_t q = row + 1; q < t.slices.size(); ++q)
                        nt.slices.push_back(t.slices[q]);
                    out.add_term(std::move(nt), tc.second * itc.second);
                }
            }
        }
    }
    return out;
}

template <class K>
MorphismSum<K> derive_iter(const PotentialDifferential<K>& pd, MorphismSum<K> m, unsigned k) {
    for (unsigned i = 0; i < k; ++i) m = derive(pd, m);
    return m;
}

// d^(k) = d^k / k!, exact at the level of canonical terms
template <class K>
MorphismSum<K> divided_power_morphism(const PotentialDifferential<K>& pd,
                                      const MorphismSum<K>& m, unsigned k) {
    if (k == 0) return m;
    MorphismSum<K> it = derive_iter(pd, m, k);
    RingCtx<K> ctx = m.ctx();
    K kf = ctx.one();
    for (unsigned i = 2; i <= k; ++i) kf = kf * ctx.from_int(i);
    MorphismSum<K> out(it.src(), it.tgt(), ctx);
    for (const auto& [key, tc] : it.terms()) {
        SOERGEL_REQUIRE(RingTraits<K>::divides(kf, tc.second),
                        "divided power is not integral: coefficient ",
                        RingTraits<K>::str(tc.second), " of term [", key, "] not divisible by ",
                        k, "!");
        out.add_term(tc.first, RingTraits<K>::div(tc.second, kf));
    }
    return out;
}

// ---- term language ----

namespace detail {

template <class K>
class TermParser {
  public:
    TermParser(std::string_view s, const Diagrams<K>& D) : s_(s), D_(D) {}

    MorphismSum<K> parse() {
        auto m = sum();
        skip();
        SOERGEL_REQUIRE(pos_ == s_.size(), "term parse: trailing input at '",
                        std::string(s_.substr(pos_)), "'");
        return m;
    }

  private:
    // pending box-only row, resolved against a neighbouring row's word
    struct PendingBox {
        Poly<K> f;
        unsigned gap;
    };
    struct Row {
        std::optional<MorphismSum<K>> m;
        std::optional<PendingBox> boxed;
    };

    MorphismSum<K> sum() {
        auto m = addend();
        skip();
        while (peek() == '+') {
            ++pos_;
            auto n = addend();
            SOERGEL_REQUIRE(n.src() == m.src() && n.tgt() == m.tgt(),
                            "term parse: summand boundaries differ");
            m += n;
            skip();
        }
        return m;
    }

    MorphismSum<K> addend() {
        skip();
        std::size_t save = pos_;
        if (peek() == '-' || std::isdigit(peek())) {
            K coeff = scalar();
            skip();
            if (peek() == '*') {
                ++pos_;
                skip();
                SOERGEL_REQUIRE(peek() == '(', "term parse: expected '(' after coefficient");
                ++pos_;
                auto m = chain();
                skip();
                SOERGEL_REQUIRE(peek() == ')', "term parse: expected ')'");
                ++pos_;
                return m.scaled(coeff);
            }
            pos_ = save;
        }
        return chain();
    }

    MorphismSum<K> chain() {
        std::vector<Row> rows;
        rows.push_back(row());
        skip();
        while (peek() == ';') {
            ++pos_;
            rows.push_back(row());
            skip();
        }
        // resolve boxed rows against the nearest concrete neighbour below,
        // else the nearest one above
        std::optional<MorphismSum<K>> acc;
        auto word_after = [&](std::size_t i) -> ObjWord {
            for (std::size_t j = i + 1; j < rows.size(); ++j)
                if (rows[j].m) return rows[j].m->src();
            SOERGEL_REQUIRE(false, "term parse: box row has no strands to attach to");
            return {};
        };
        for (std::size_t i = 0; i < rows.size(); ++i) {
            MorphismSum<K> cur = [&] {
                if (rows[i].m) return *rows[i].m;
                ObjWord w = acc ? acc->tgt() : word_after(i);
                SOERGEL_REQUIRE(rows[i].boxed->gap <= w.size(), "term parse: box gap ",
                                rows[i].boxed->gap, " outside word of length ", w.size());
                return D_.box_slice(w, rows[i].boxed->gap, rows[i].boxed->f);
            }();
            acc = acc ? compose_v(cur, *acc) : cur;
        }
        return *acc;
    }

    Row row() {
        skip();
        // a lone poly[..]@k factor defers its word
        std::size_t save = pos_;
        if (match_word("poly")) {
            Poly<K> f = poly_body();
            skip();
            if (peek() == '@') {
                ++pos_;
                unsigned gap = uint_();
                skip();
                SOERGEL_REQUIRE(peek() != '|', "term parse: poly@gap must stand alone in a row");
                return Row{std::nullopt, PendingBox{f, gap}};
            }
            pos_ = save;
        }
        auto m = factor();
        skip();
        while (peek() == '|') {
            ++pos_;
            m = compose_h(m, factor());
            skip();
        }
        return Row{m, std::nullopt};
    }

    MorphismSum<K> factor() {
        skip();
        if (peek() == '(') {
            ++pos_;
            auto m = chain();
            skip();
            SOERGEL_REQUIRE(peek() == ')', "term parse: expected ')'");
            ++pos_;
            return m;
        }
        if (match_word("poly")) {
            Poly<K> f = poly_body();
            return D_.polybox(f);
        }
        std::string name = ident();
        auto args = int_args();
        auto arg = [&](std::size_t i) -> Gen {
            SOERGEL_REQUIRE(i < args.size(), "term parse: '", name, "' needs more arguments");
            return Gen(args[i]);
        };
        auto expect = [&](std::size_t n) {
            SOERGEL_REQUIRE(args.size() == n, "term parse: '", name, "' takes ", n,
                            " arguments");
        };
        if (name == "id") { expect(1); return D_.identity(D_.w({arg(0)})); }
        if (name == "idthick") { expect(2); return D_.thick_id(arg(0), arg(1)); }
        if (name == "empty") { expect(0); return D_.identity({}); }
        if (name == "startdot") { expect(1); return D_.startdot(arg(0)); }
        if (name == "enddot") { expect(1); return D_.enddot(arg(0)); }
        if (name == "split") { expect(1); return D_.split(arg(0)); }
        if (name == "merge") { expect(1); return D_.merge(arg(0)); }
        if (name == "cup") { expect(1); return D_.cup(arg(0)); }
        if (name == "cap") { expect(1); return D_.cap(arg(0)); }
        if (name == "brk") { expect(1); return D_.brk(arg(0)); }
        if (name == "barbell") { expect(1); return D_.barbell(arg(0)); }
        if (name == "cross") { expect(2); return D_.cross(arg(0), arg(1)); }
        if (name == "phi") { expect(2); return D_.six_phi(arg(0), arg(1)); }
        if (name == "psi") { expect(2); return D_.six_psi(arg(0), arg(1)); }
        if (name == "thicksplit") { expect(2); return D_.thick_split(arg(0), arg(1)); }
        if (name == "thickmerge") { expect(2); return D_.thick_merge(arg(0), arg(1)); }
        if (name == "ttridr") { expect(3); return D_.ttri_dr(arg(0), arg(1), arg(2)); }
        if (name == "ttridl") { expect(3); return D_.ttri_dl(arg(0), arg(1), arg(2)); }
        if (name == "ttriur") { expect(3); return D_.ttri_ur(arg(0), arg(1), arg(2)); }
        if (name == "ttriul") { expect(3); return D_.ttri_ul(arg(0), arg(1), arg(2)); }
        SOERGEL_REQUIRE(false, "term parse: unknown generator '", name, "'");
        return D_.identity({});
    }

    Poly<K> poly_body() {
        skip();
        SOERGEL_REQUIRE(peek() == '[', "term parse: expected '[' after poly");
        ++pos_;
        std::size_t end = s_.find(']', pos_);
        SOERGEL_REQUIRE(end != std::string_view::npos, "term parse: unterminated poly[");
        Poly<K> f = parse_poly<K>(s_.substr(pos_, end - pos_), D_.ctx());
        pos_ = end + 1;
        return f;
    }

    K scalar() {
        skip();
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        }
        std::int64_t num = int_body();
        std::int64_t den = 1;
        if (peek() == '/') {
            ++pos_;
            den = int_body();
        }
        K v = D_.ctx().from_int(neg ? -num : num);
        if (den != 1) v = RingTraits<K>::div(v, D_.ctx().from_int(den));
        return v;
    }

    std::vector<int> int_args() {
        skip();
        SOERGEL_REQUIRE(peek() == '(', "term parse: expected '('");
        ++pos_;
        std::vector<int> args;
        skip();
        if (peek() != ')') {
            args.push_back(int(int_body()));
            skip();
            while (peek() == ',') {
                ++pos_;
                args.push_back(int(int_body()));
                skip();
            }
        }
        SOERGEL_REQUIRE(peek() == ')', "term parse: expected ')' in argument list");
        ++pos_;
        return args;
    }

    std::string ident() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(peek()) || peek() == '_')) ++pos_;
        SOERGEL_REQUIRE(pos_ > start, "term parse: expected a generator name at '",
                        std::string(s_.substr(start, 8)), "'");
        return std::string(s_.substr(start, pos_ - start));
    }

    bool match_word(std::string_view word) {
        skip();
        if (s_.substr(pos_, word.size()) != word) return false;
        std::size_t after = pos_ + word.size();
        if (after < s_.size() && (std::isalnum(s_[after]) || s_[after] == '_')) return false;
        pos_ = after;
        return true;
    }

    std::int64_t int_body() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(peek())) ++pos_;
        SOERGEL_REQUIRE(pos_ > start, "term parse: expected a number");
        return std::stoll(std::string(s_.substr(start, pos_ - start)));
    }
    unsigned uint_() { return unsigned(int_body()); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    std::string_view s_;
    const Diagrams<K>& D_;
    std::size_t pos_ = 0;
};

} // namespace detail

template <class K>
MorphismSum<K> Diagrams<K>::parse(std::string_view text) const {
    return detail::TermParser<K>(text, *this).parse();
}

template <class K>
std::string Diagrams<K>::str(const MorphismSum<K>& m) const {
    if (m.is_zero()) return detail::concat("0 : ", obj_str(m.src()), " -> ", obj_str(m.tgt()));
    std::string out;
    for (const auto& [key, tc] : m.terms()) {
        if (!out.empty()) out += " + ";
        const DiagramTerm<K>& t = tc.first;
        std::string chain;
        if (t.slices.empty()) {
            if (t.bottom.empty()) {
                chain = "empty()";
            } else {
                for (std::size_t i = 0; i < t.bottom.size(); ++i) {
                    if (i) chain += " | ";
                    chain += t.bottom[i].is_thick()
                                 ? detail::concat("idthick(", int(t.bottom[i].lo), ",",
                                                  int(t.bottom[i].hi), ")")
                                 : detail::concat("id(", int(t.bottom[i].lo), ")");
                }
            }
        } else {
            for (std::size_t r = 0; r < t.slices.size(); ++r) {
                if (r) chain += " ; ";
                const auto& gens = t.slices[r].gens;
                for (std::size_t i = 0; i < gens.size(); ++i) {
                    if (i) chain += " | ";
                    if (gens[i].is_identity())
                        chain += gens[i].strand.is_thick()
                                     ? detail::concat("idthick(", int(gens[i].strand.lo), ",",
                                                      int(gens[i].strand.hi), ")")
                                     : detail::concat("id(", int(gens[i].strand.lo), ")");
                    else
                        chain += gens[i].key();
                }
            }
        }
        out += detail::concat(RingTraits<K>::str(tc.second), " * (", chain, ")");
    }
    return out;
}

} // namespace soergel
