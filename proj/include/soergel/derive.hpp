#pragma once

#include <soergel/diagram.hpp>
#include <soergel/diffdata.hpp>

// Differential on diagrams induced by a potential differential. The ring part
// acts on box contents; each generator has a fixed image built from decorated
// copies of itself; everything else follows from the Leibniz rule, with no
// signs because the differential has even degree.

namespace soergel {

namespace detail {

template <class K>
MorphismSum<K> gen_morphism(const DGen<K>& g, RingCtx<K> ctx) {
    DiagramTerm<K> t;
    t.bottom = g.src();
    t.slices.push_back(Slice<K>{{g}});
    return MorphismSum<K>::single(std::move(t), ctx.one(), ctx);
}

template <class K>
MorphismSum<K> slice_range(const ObjWord& bottom, const std::vector<Slice<K>>& slices,
                           std::size_t lo, std::size_t hi, RingCtx<K> ctx) {
    DiagramTerm<K> t;
    t.bottom = bottom;
    for (std::size_t i = lo; i < hi; ++i) t.slices.push_back(slices[i]);
    return MorphismSum<K>::single(std::move(t), ctx.one(), ctx);
}

template <class K>
K demazure_constant(const Realization<K>& r, Gen s, const Poly<K>& f) {
    Poly<K> d = r.demazure(s, f);
    SOERGEL_REQUIRE(d.is_zero() || d.total_degree() == 0u,
                    "derive: demazure of a decoration polynomial is not constant: ", d.str());
    return d.constant_term();
}

// image of a single generator under the differential
template <class K>
MorphismSum<K> derive_gen(const PotentialDifferential<K>& pd, const Diagrams<K>& D,
                          const DGen<K>& g) {
    const Realization<K>& r = pd.realization();
    RingCtx<K> ctx = D.ctx();
    MorphismSum<K> out(g.src(), g.tgt(), ctx);
    switch (g.kind) {
        case DgKind::identity:
            return out;
        case DgKind::box: {
            Poly<K> df = pd.ring_differential()(g.f);
            if (!df.is_zero()) out += D.polybox(df);
            return out;
        }
        case DgKind::startdot:
            out += compose_h(D.polybox(pd.gbar(g.s)), D.startdot(g.s));
            return out;
        case DgKind::enddot:
            out += compose_h(D.polybox(pd.g(g.s)), D.enddot(g.s));
            return out;
        case DgKind::split: {
            // -g_s between the upper legs
            Poly<K> f = pd.g(g.s).scaled(ctx.from_int(-1));
            if (!f.is_zero()) out += compose_v(D.box_slice(g.tgt(), 1, f), D.split(g.s));
            return out;
        }
        case DgKind::merge: {
            // -gbar_s between the lower legs
            Poly<K> f = pd.gbar(g.s).scaled(ctx.from_int(-1));
            if (!f.is_zero()) out += compose_v(D.merge(g.s), D.box_slice(g.src(), 1, f));
            return out;
        }
        case DgKind::cross: {
            // decorations sit north, east and south of the crossing
            Gen s = g.s, u = g.t;
            MorphismSum<K> X = D.cross(s, u);
            Poly<K> north = pd.g(u).scaled(ctx.from_int(-1));
            Poly<K> east = pd.g(u) - pd.g(s);
            const Poly<K>& south = pd.g(s);
            if (!north.is_zero()) out += compose_v(D.box_slice(g.tgt(), 1, north), X);
            if (!east.is_zero()) out += compose_v(D.box_slice(g.tgt(), 2, east), X);
            if (!south.is_zero()) out += compose_v(X, D.box_slice(g.src(), 1, south));
            return out;
        }
        case DgKind::six: {
            Gen s = g.s, t = g.t;
            MorphismSum<K> phi = D.six_phi(s, t);
            const ObjWord bot = g.src(), top = g.tgt();
            K A = -demazure_constant(r, s, pd.g(t));
            K B = -demazure_constant(r, t, pd.gbar(s));
            K C = demazure_constant(r, t, pd.gbar(t)) - demazure_constant(r, t, pd.g(s)) -
                  demazure_constant(r, s, pd.g(t));
            K E = demazure_constant(r, s, pd.g(s)) - demazure_constant(r, s, pd.gbar(t)) -
                  demazure_constant(r, t, pd.gbar(s));
            K cs = demazure_constant(r, s, pd.g(s)) + demazure_constant(r, t, pd.g(s));
            K ct = demazure_constant(r, t, pd.g(t)) + demazure_constant(r, s, pd.g(t));
            Poly<K> f = pd.g(s) - pd.g(t) - r.root(s).scaled(cs) + r.root(t).scaled(ct);
            out += compose_v(D.brk_at(top, 1), phi).scaled(A);   // break upper middle
            out += compose_v(phi, D.brk_at(bot, 1)).scaled(B);   // break lower middle
            out += compose_v(D.brk_at(top, 2), phi).scaled(C);   // break upper right
            out += compose_v(phi, D.brk_at(bot, 2)).scaled(E);   // break lower right
            if (!f.is_zero()) out += compose_v(D.box_slice(top, 3, f), phi);
            return out;
        }
        default:
            SOERGEL_REQUIRE(false, "derive: no differential formula for generator ", g.key());
    }
    return out;
}

} // namespace detail

template <class K>
MorphismSum<K> derive(const PotentialDifferential<K>& pd, const MorphismSum<K>& m) {
    RingCtx<K> ctx = m.ctx();
    Diagrams<K> D(pd.realization().graph(), ctx);
    MorphismSum<K> out(m.src(), m.tgt(), ctx);
    for (const auto& [key, tc] : m.terms()) {
        const DiagramTerm<K>& T = tc.first;
        for (std::size_t si = 0; si < T.slices.size(); ++si) {
            const Slice<K>& row = T.slices[si];
            for (std::size_t gi = 0; gi < row.gens.size(); ++gi) {
                MorphismSum<K> dg = detail::derive_gen(pd, D, row.gens[gi]);
                if (dg.is_zero()) continue;
                MorphismSum<K> mid = D.identity({});
                for (std::size_t gj = 0; gj < row.gens.size(); ++gj)
                    mid = compose_h(mid, gj == gi ? dg
                                                  : detail::gen_morphism(row.gens[gj], ctx));
                MorphismSum<K> below = detail::slice_range(T.bottom, T.slices, 0, si, ctx);
                MorphismSum<K> above =
                    detail::slice_range(row.tgt(), T.slices, si + 1, T.slices.size(), ctx);
                out += compose_v(above, compose_v(mid, below)).scaled(tc.second);
            }
        }
    }
    return out;
}

template <class K>
MorphismSum<K> derive_iter(const PotentialDifferential<K>& pd, const MorphismSum<K>& m,
                           unsigned k) {
    MorphismSum<K> out = m;
    for (unsigned i = 0; i < k; ++i) out = derive(pd, out);
    return out;
}

} // namespace soergel
