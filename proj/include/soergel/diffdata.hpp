#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "soergel/derivation.hpp"
#include "soergel/matrixk.hpp"
#include "soergel/realization.hpp"

namespace soergel {

// strict: constraint checks run at construction and must pass.
// relaxed: caller opts out, e.g. to probe how relations fail under a
// deliberately broken differential.
enum class PdMode { strict, relaxed };

// The defining data of a differential on the diagrammatic category: a
// derivation d on R together with linear polynomials g_s, gbar_s per color.
// Derived quantities: z_s = g_s + gbar_s and the scalar tables
// kappa_{st} = partial_s(g_t), kappabar_{st} = partial_s(gbar_t).
template <class K>
class PotentialDifferential {
public:
    PotentialDifferential(Realization<K> r, RingDerivation<K> dR, std::vector<Poly<K>> g,
                          std::vector<Poly<K>> gbar, PdMode mode = PdMode::strict)
        : r_(std::move(r)), dR_(std::move(dR)), g_(std::move(g)), gbar_(std::move(gbar)) {
        SOERGEL_REQUIRE(g_.size() == r_.rank() && gbar_.size() == r_.rank(),
                        "potential differential needs one g and one gbar per generator");
        for (unsigned s = 0; s < r_.rank(); ++s) z_.push_back(g_[s] + gbar_[s]);
        if (mode == PdMode::strict) {
            auto rep = check_potential();
            SOERGEL_REQUIRE(rep.pass(), "potential differential check failed: ",
                            rep.pass() ? "" : rep.first_failure()->name, " ",
                            rep.pass() ? "" : rep.first_failure()->witness);
            checked_ = true;
        }
    }

    static PotentialDifferential zero(const Realization<K>& r) {
        std::vector<Poly<K>> zs(r.rank());
        return PotentialDifferential(r, RingDerivation<K>({}, r.ctx()), zs, zs);
    }

    // Standard differential d(x_i) = x_i^2 with g_{s_i} = x_i (forward) or
    // x_{i+1} (reverse). Works on the full polynomial realization and on the
    // quotient where the last variable is minus the sum of the others.
    static PotentialDifferential standard_type_a(const Realization<K>& r, bool reverse,
                                                 PdMode mode = PdMode::strict) {
        unsigned n = r.rank() + 1;
        SOERGEL_REQUIRE(r.nvars() == n || r.nvars() == n - 1,
                        "type A preset expects n or n-1 variables for rank n-1");
        auto xi = [&](unsigned i) -> Poly<K> {  // 1-based, folding x_n in the quotient
            if (i <= r.nvars()) return r.var(i);
            Poly<K> s;
            for (unsigned j = 1; j < n; ++j) s += r.var(j);
            return s.scaled(r.ctx().from_int(-1));
        };
        std::vector<Poly<K>> images, g, gbar;
        for (unsigned i = 1; i <= r.nvars(); ++i) images.push_back(r.var(i) * r.var(i));
        for (unsigned s = 1; s <= r.rank(); ++s) {
            g.push_back(reverse ? xi(s + 1) : xi(s));
            gbar.push_back(reverse ? xi(s) : xi(s + 1));
        }
        return PotentialDifferential(r, RingDerivation<K>(std::move(images), r.ctx()),
                                     std::move(g), std::move(gbar), mode);
    }

    const Realization<K>& realization() const { return r_; }
    const RingDerivation<K>& ring_differential() const { return dR_; }
    const Poly<K>& g(Gen s) const { return g_.at(s); }
    const Poly<K>& gbar(Gen s) const { return gbar_.at(s); }
    const Poly<K>& z(Gen s) const { return z_.at(s); }
    bool checked() const { return checked_; }

    bool is_zero() const {
        if (!dR_.is_zero()) {
            for (const auto& im : dR_.images())
                if (!im.is_zero()) return false;
        }
        for (const auto& f : g_)
            if (!f.is_zero()) return false;
        for (const auto& f : gbar_)
            if (!f.is_zero()) return false;
        return true;
    }

    // partial_s of a linear form is a scalar
    K demazure_scalar(Gen s, const Poly<K>& f) const {
        Poly<K> d = r_.demazure(s, f);
        SOERGEL_REQUIRE(d.is_constant(), "expected a scalar from partial_", unsigned(s) + 1, "(",
                        f.str(), ")");
        return d.constant_term();
    }

    K kappa(Gen s, Gen t) const { return demazure_scalar(s, g_.at(t)); }
    K kappa_bar(Gen s, Gen t) const { return demazure_scalar(s, gbar_.at(t)); }

    ValidationReport check_potential() const {
        ValidationReport rep;
        rep.warn_char2_quotient = r_.is_char2();
        const auto& ctx = r_.ctx();
        unsigned rank = r_.rank();

        bool lin = true;
        std::string lw;
        auto check_linear = [&](const Poly<K>& f, const char* what, unsigned s) {
            if (f.is_zero()) return;
            if (!f.is_homogeneous() || f.total_degree() != 1) {
                lin = false;
                if (lw.empty()) lw = detail::concat(what, "_", s + 1, " = ", f.str());
            }
        };
        for (unsigned s = 0; s < rank; ++s) {
            check_linear(g_[s], "g", s);
            check_linear(gbar_[s], "gbar", s);
        }
        rep.checks.push_back({"linear_g_data", lin, lw});

        bool dq = true;
        std::string dqw;
        for (const auto& im : dR_.images()) {
            if (im.is_zero()) continue;
            if (!im.is_homogeneous() || im.total_degree() != 2) {
                dq = false;
                dqw = im.str();
                break;
            }
        }
        rep.checks.push_back({"d_quadratic_images", dq, dqw});

        bool comm = true;
        std::string cw;
        for (unsigned s = 0; s < rank && comm; ++s)
            for (unsigned i = 1; i <= r_.nvars(); ++i) {
                Poly<K> lhs = dR_(r_.act_gen(Gen(s), r_.var(i)));
                Poly<K> rhs = r_.act_gen(Gen(s), dR_(r_.var(i)));
                if (lhs != rhs) {
                    comm = false;
                    cw = detail::concat("s", s + 1, ", x", i, ": ", (lhs - rhs).str());
                    break;
                }
            }
        rep.checks.push_back({"d_commutes_with_group", comm, cw});

        bool da = true;
        std::string daw;
        for (unsigned s = 0; s < rank; ++s) {
            Poly<K> lhs = dR_(r_.root(Gen(s)));
            Poly<K> rhs = r_.root(Gen(s)) * z_[s];
            if (lhs != rhs) {
                da = false;
                daw = detail::concat("s", s + 1, ": d(alpha) - alpha*z = ", (lhs - rhs).str());
                break;
            }
        }
        rep.checks.push_back({"d_alpha_is_alpha_z", da, daw});

        bool zi = true;
        std::string ziw;
        for (unsigned s = 0; s < rank; ++s) {
            Poly<K> d = r_.demazure(Gen(s), z_[s]);
            if (!d.is_zero()) {
                zi = false;
                ziw = detail::concat("partial_", s + 1, "(z_", s + 1, ") = ", d.str());
                break;
            }
        }
        rep.checks.push_back({"z_invariant", zi, ziw});

        bool zd = true;
        std::string zdw;
        for (unsigned s = 0; s < rank && zd; ++s)
            for (unsigned u = 0; u < rank; ++u) {
                if (u == s || r_.graph().adjacent(Gen(s), Gen(u))) continue;
                Poly<K> d = r_.demazure(Gen(u), z_[s]);
                if (!d.is_zero()) {
                    zd = false;
                    zdw = detail::concat("partial_", u + 1, "(z_", s + 1, ") = ", d.str());
                    break;
                }
            }
        rep.checks.push_back({"z_distant_invariant", zd, zdw});

        // s(alpha_t) partial_s(z_t) = partial_s(alpha_t) (z_s - z_t)
        bool pr = true;
        std::string prw;
        for (unsigned s = 0; s < rank && pr; ++s)
            for (unsigned t = 0; t < rank; ++t) {
                if (t == s) continue;
                Poly<K> lhs = r_.act_gen(Gen(s), r_.root(Gen(t))) * r_.demazure(Gen(s), z_[t]);
                K c = demazure_scalar(Gen(s), r_.root(Gen(t)));
                Poly<K> rhs = (z_[s] - z_[t]).scaled(c);
                if (lhs != rhs) {
                    pr = false;
                    prw = detail::concat("s", s + 1, ", t", t + 1, ": ", (lhs - rhs).str());
                    break;
                }
            }
        rep.checks.push_back({"z_proportional", pr, prw});

        bool za = true;
        std::string zaw;
        for (auto [s, t] : r_.graph().edges()) {
            Poly<K> sum = r_.demazure(s, z_[t]) + r_.demazure(t, z_[s]);
            if (!sum.is_zero()) {
                za = false;
                zaw = detail::concat("s", unsigned(s) + 1, ", t", unsigned(t) + 1, ": ", sum.str());
                break;
            }
        }
        rep.checks.push_back({"z_adjacent_antisymmetric", za, zaw});
        (void)ctx;
        return rep;
    }

    Json to_json() const {
        Json j;
        j["schema"] = "differential/1";
        Json d = Json::array();
        for (const auto& im : dR_.images()) d.push_back(im.str());
        j["d"] = std::move(d);
        Json gj = Json::array(), gb = Json::array();
        for (unsigned s = 0; s < r_.rank(); ++s) {
            gj.push_back(g_[s].str());
            gb.push_back(gbar_[s].str());
        }
        j["g"] = std::move(gj);
        j["gbar"] = std::move(gb);
        return j;
    }

    static PotentialDifferential from_json(const Realization<K>& r, const Json& j,
                                           PdMode mode = PdMode::strict) {
        SOERGEL_REQUIRE(j.is_object() && j.value("schema", "") == "differential/1",
                        "differential block needs schema \"differential/1\"");
        auto parse_list = [&](const char* key, std::size_t want) {
            std::vector<Poly<K>> out;
            SOERGEL_REQUIRE(j.contains(key) && j[key].is_array(), "differential block: missing array \"",
                            key, "\"");
            for (const auto& e : j[key]) out.push_back(parse_poly<K>(e.get<std::string>(), r.ctx()));
            SOERGEL_REQUIRE(out.size() == want, "differential block: \"", key, "\" needs ", want,
                            " entries, got ", out.size());
            return out;
        };
        auto images = parse_list("d", j["d"].size());
        SOERGEL_REQUIRE(images.size() == r.nvars() || images.empty(),
                        "differential block: \"d\" needs one image per variable");
        return PotentialDifferential(r, RingDerivation<K>(std::move(images), r.ctx()),
                                     parse_list("g", r.rank()), parse_list("gbar", r.rank()), mode);
    }

private:
    Realization<K> r_;
    RingDerivation<K> dR_;
    std::vector<Poly<K>> g_, gbar_, z_;
    bool checked_ = false;
};

// Coefficients in the differential of the 6-valent vertex phi: BsBtBs -> BtBsBt
// (unprimed) and of psi: BtBsBt -> BsBtBs (primed, the color swap).
template <class K>
struct SixValentCoeffs {
    K A, B, C, D, E;
    Poly<K> f;
    K Ap, Bp, Cp, Dp, Ep;
    Poly<K> fp;
};

template <class K>
SixValentCoeffs<K> six_valent_coeffs(const PotentialDifferential<K>& pd, Gen s, Gen t) {
    const auto& r = pd.realization();
    SOERGEL_REQUIRE(r.graph().adjacent(s, t), "six_valent_coeffs needs adjacent colors");
    auto k = [&](Gen a, Gen b) { return pd.kappa(a, b); };
    auto kb = [&](Gen a, Gen b) { return pd.kappa_bar(a, b); };
    SixValentCoeffs<K> c;
    c.A = -k(s, t);
    c.B = -kb(t, s);
    c.C = kb(t, t) - k(t, s) - k(s, t);
    c.D = k(s, s) - kb(s, t) - kb(t, s);
    c.E = r.ctx().zero();
    c.f = pd.g(s) - pd.g(t) - r.root(s).scaled(k(s, s) + k(t, s)) -
          r.root(t).scaled(kb(t, t) - k(s, t));
    c.Ap = -k(t, s);
    c.Bp = -kb(s, t);
    c.Cp = kb(s, s) - k(s, t) - k(t, s);
    c.Dp = k(t, t) - kb(t, s) - kb(s, t);
    c.Ep = r.ctx().zero();
    c.fp = pd.g(t) - pd.g(s) - r.root(t).scaled(k(t, t) + k(s, t)) -
           r.root(s).scaled(kb(s, s) - k(t, s));
    return c;
}

// The same polynomial f obtained from the upside-down color-swapped
// associativity relation; agreement with SixValentCoeffs::f is a consequence
// of the z_s constraints and is verified by the test suite.
template <class K>
Poly<K> six_valent_f_alternative(const PotentialDifferential<K>& pd, Gen s, Gen t) {
    const auto& r = pd.realization();
    return pd.gbar(t) - pd.gbar(s) - r.root(t).scaled(pd.kappa_bar(t, t) + pd.kappa_bar(s, t)) -
           r.root(s).scaled(pd.kappa(s, s) - pd.kappa_bar(t, s));
}

// Scalar identities every potential differential satisfies; used as a
// randomized property check.
template <class K>
ValidationReport six_valent_invariants(const PotentialDifferential<K>& pd, Gen s, Gen t) {
    auto c = six_valent_coeffs(pd, s, t);
    ValidationReport rep;
    auto zero = [&](const char* name, const K& v) {
        rep.checks.push_back({name, RingTraits<K>::is_zero(v), RingTraits<K>::is_zero(v) ? "" : RingTraits<K>::str(v)});
    };
    zero("pitchfork_top_scalar", c.C - c.A + pd.kappa(t, s) - pd.kappa_bar(t, t));
    zero("pitchfork_bottom_scalar", c.D - c.B + pd.kappa_bar(s, t) - pd.kappa(s, s));
    zero("swap_D_is_minus_C", c.Dp + c.C);
    zero("swap_C_is_minus_D", c.Cp + c.D);
    zero("E_vanishes", c.E);
    Poly<K> fd = c.f - six_valent_f_alternative(pd, s, t);
    rep.checks.push_back({"f_flip_consistent", fd.is_zero(), fd.is_zero() ? "" : fd.str()});
    return rep;
}

template <class K>
struct GoodVerdict {
    bool good = false;
    bool zero = false;                       // every g_s vanishes
    std::optional<Orientation> orientation;  // set when good and nonzero
    K kappa{};
    ValidationReport report;
};

// The good-differential characterization: d(g_s) = g_s^2, gbar_s = s(g_s),
// distant invariance, adjacent propagation g_t = st(g_s), the source/sink
// dichotomy per edge, and consistency of the induced orientation.
template <class K>
GoodVerdict<K> check_good(const PotentialDifferential<K>& pd) {
    const auto& r = pd.realization();
    const auto& g = r.graph();
    unsigned rank = r.rank();
    GoodVerdict<K> v;
    v.kappa = r.ctx().zero();
    ValidationReport& rep = v.report;

    {
        auto pot = pd.check_potential();
        rep.checks.push_back(
            {"potential", pot.pass(), pot.pass() ? std::string() : pot.first_failure()->name});
        rep.warn_char2_quotient = pot.warn_char2_quotient;
    }

    bool sq = true;
    std::string sqw;
    for (unsigned s = 0; s < rank; ++s) {
        Poly<K> diff = pd.ring_differential()(pd.g(Gen(s))) - pd.g(Gen(s)) * pd.g(Gen(s));
        if (!diff.is_zero()) {
            sq = false;
            sqw = detail::concat("s", s + 1, ": d(g) - g^2 = ", diff.str());
            break;
        }
    }
    rep.checks.push_back({"d_g_is_g_squared", sq, sqw});

    bool gb = true;
    std::string gbw;
    for (unsigned s = 0; s < rank; ++s) {
        Poly<K> diff = pd.gbar(Gen(s)) - r.act_gen(Gen(s), pd.g(Gen(s)));
        if (!diff.is_zero()) {
            gb = false;
            gbw = detail::concat("s", s + 1, ": gbar - s(g) = ", diff.str());
            break;
        }
    }
    rep.checks.push_back({"gbar_is_s_of_g", gb, gbw});

    bool di = true;
    std::string diw;
    for (unsigned s = 0; s < rank && di; ++s)
        for (unsigned u = 0; u < rank; ++u) {
            if (u == s || g.adjacent(Gen(s), Gen(u))) continue;
            Poly<K> diff = r.act_gen(Gen(u), pd.g(Gen(s))) - pd.g(Gen(s));
            if (!diff.is_zero()) {
                di = false;
                diw = detail::concat("u", u + 1, "(g_", s + 1, ") - g_", s + 1, " = ", diff.str());
                break;
            }
        }
    rep.checks.push_back({"distant_invariance", di, diw});

    unsigned nonzero = 0;
    for (unsigned s = 0; s < rank; ++s)
        if (!pd.g(Gen(s)).is_zero()) ++nonzero;
    v.zero = nonzero == 0;
    bool uniform = nonzero == 0 || nonzero == rank;
    rep.checks.push_back({"component_support", uniform,
                          uniform ? "" : detail::concat(nonzero, " of ", rank, " colors nonzero")});

    bool ni = true;
    std::string niw;
    for (unsigned s = 0; s < rank; ++s) {
        if (pd.g(Gen(s)).is_zero()) continue;
        if (r.act_gen(Gen(s), pd.g(Gen(s))) == pd.g(Gen(s))) {
            ni = false;
            niw = detail::concat("g_", s + 1, " = ", pd.g(Gen(s)).str(), " is s-invariant");
            break;
        }
    }
    rep.checks.push_back({"nonzero_not_invariant", ni, niw});

    bool ap = true;
    std::string apw;
    for (auto [s, t] : g.edges()) {
        Poly<K> diff = pd.g(t) - r.act_group({s, t}, pd.g(s));
        if (!diff.is_zero()) {
            ap = false;
            apw = detail::concat("g_", unsigned(t) + 1, " - st(g_", unsigned(s) + 1,
                                 ") = ", diff.str());
            break;
        }
    }
    rep.checks.push_back({"adjacent_propagation", ap, apw});

    bool dich = true;
    std::string dw;
    Orientation ori;
    if (nonzero > 0) {
        for (auto [s, t] : g.edges()) {
            bool fix_t = r.act_gen(t, pd.g(s)) == pd.g(s);
            bool fix_sts = r.act_group({s, t, s}, pd.g(s)) == pd.g(s);
            if (fix_t == fix_sts) {
                dich = false;
                dw = detail::concat("edge s", unsigned(s) + 1, "-s", unsigned(t) + 1, ": fixed by t ",
                                    fix_t ? "and" : "nor", " by sts");
                break;
            }
            if (fix_t) ori.edges.emplace_back(s, t);
            else ori.edges.emplace_back(t, s);
        }
    }
    rep.checks.push_back({"edge_dichotomy", dich, dw});

    bool oc = true;
    std::string ow;
    if (nonzero > 0 && dich) {
        for (unsigned m = 0; m < rank && oc; ++m) {
            auto nb = g.neighbors(Gen(m));
            for (std::size_t a = 0; a < nb.size() && oc; ++a)
                for (std::size_t b = a + 1; b < nb.size(); ++b) {
                    bool in_a = ori.has_edge(nb[a], Gen(m));
                    bool in_b = ori.has_edge(nb[b], Gen(m));
                    if (in_a == in_b) {
                        oc = false;
                        ow = detail::concat("vertex s", m + 1, " is a ", in_a ? "sink" : "source",
                                            " of the pair (s", unsigned(nb[a]) + 1, ", s",
                                            unsigned(nb[b]) + 1, ")");
                        break;
                    }
                }
        }
    }
    rep.checks.push_back({"orientation_consistent", oc, ow});

    bool ku = true;
    std::string kw;
    if (nonzero > 0) {
        K k0 = pd.kappa(Gen(0), Gen(0));
        for (unsigned s = 1; s < rank; ++s) {
            K ks = pd.kappa(Gen(s), Gen(s));
            if (!RingTraits<K>::is_zero(ks - k0)) {
                ku = false;
                kw = detail::concat("kappa at s", s + 1, " = ", RingTraits<K>::str(ks), " vs ",
                                    RingTraits<K>::str(k0));
                break;
            }
        }
        v.kappa = k0;
    }
    rep.checks.push_back({"kappa_uniform", ku, kw});

    v.good = rep.pass();
    if (v.good && !v.zero) v.orientation = std::move(ori);
    return v;
}

namespace detail {

// Roots of a*y^2 + b*y + c over the coefficient field. nullopt means the
// equation is identically zero (no constraint).
template <class K>
std::optional<std::vector<K>> quadratic_roots(const K& a, const K& b, const K& c,
                                              const RingCtx<K>& ctx) {
    static_assert(RingTraits<K>::is_field, "root solving needs a field");
    bool za = RingTraits<K>::is_zero(a), zb = RingTraits<K>::is_zero(b),
         zc = RingTraits<K>::is_zero(c);
    if (za && zb && zc) return std::nullopt;
    if (za && zb) return std::vector<K>{};
    if (za) return std::vector<K>{RingTraits<K>::div(c, b) * ctx.from_int(-1)};
    if constexpr (std::is_same_v<K, Fp>) {
        std::vector<K> roots;
        std::int64_t p = ctx.characteristic();
        SOERGEL_REQUIRE(p > 0 && p < 100000, "prime too large for root enumeration");
        for (std::int64_t t = 0; t < p; ++t) {
            K y = ctx.from_int(t);
            if (RingTraits<K>::is_zero((a * y + b) * y + c)) roots.push_back(y);
        }
        return roots;
    } else {
        // rational roots via a square discriminant
        K disc = b * b - ctx.from_int(4) * a * c;
        if (RingTraits<K>::is_neg(disc)) return std::vector<K>{};
        Rat dr(disc);
        Int num = boost::multiprecision::numerator(dr);
        Int den = boost::multiprecision::denominator(dr);
        Int sn = boost::multiprecision::sqrt(num), sd = boost::multiprecision::sqrt(den);
        if (sn * sn != num || sd * sd != den) return std::vector<K>{};
        K root = K(Rat(sn, sd));
        K two_a = ctx.from_int(2) * a;
        std::vector<K> roots{RingTraits<K>::div(root - b, two_a)};
        if (!RingTraits<K>::is_zero(root)) {
            roots.push_back(RingTraits<K>::div(ctx.from_int(0) - root - b, two_a));
            if (roots[1] < roots[0]) std::swap(roots[0], roots[1]);
        }
        return roots;
    }
}

template <class K>
Poly<K> linear_from_coeffs(const std::vector<K>& c, const RingCtx<K>& ctx) {
    Poly<K> f;
    for (unsigned i = 0; i < c.size(); ++i) f.add_term(Monomial::var(i + 1, 1), c[i]);
    (void)ctx;
    return f;
}

template <class K>
std::vector<K> coeffs_of_linear(const Poly<K>& f, unsigned nvars, const RingCtx<K>& ctx) {
    std::vector<K> c(nvars, ctx.zero());
    for (const auto& [m, v] : f.terms()) {
        SOERGEL_REQUIRE(m.total_degree() == 1, "not a linear form: ", f.str());
        for (unsigned i = 0; i < nvars; ++i)
            if (m.exp(i + 1) == 1) c[i] = v;
    }
    return c;
}

}  // namespace detail

template <class K>
struct ClassifyResult {
    std::vector<PotentialDifferential<K>> solutions;  // zero differential first
    bool exhaustive = true;  // false when a heuristic grid was the only search
    std::string note;
};

// All good differentials with linear g_s extending the given derivation on R:
// solve d(g) = g^2 and g + s(g) = z_s at a base color, propagate g_t = st(g_s)
// across the graph, and keep what passes check_good. The zero differential
// (zero derivation, zero g) is always reported first.
template <class K>
ClassifyResult<K> classify_good(const Realization<K>& r, const RingDerivation<K>& dR) {
    static_assert(RingTraits<K>::is_field,
                  "classify_good solves linear systems; run integral data over the rationals");
    SOERGEL_REQUIRE(r.graph().connected(), "classify_good needs a connected graph");
    const auto& ctx = r.ctx();
    unsigned nvars = r.nvars();

    ClassifyResult<K> out;
    out.solutions.push_back(PotentialDifferential<K>::zero(r));

    // z at the base color, from d(alpha) = alpha * z
    Gen s0 = 0;
    Poly<K> z0;
    {
        auto dv = divide(dR(r.root(s0)), r.root(s0));
        if (!dv.exact) {
            out.note = "d(alpha) is not a multiple of alpha at the base color; no nonzero solutions";
            return out;
        }
        z0 = dv.quot;
        if (!z0.is_zero() && (!z0.is_homogeneous() || z0.total_degree() != 1)) {
            out.note = "z at the base color is not linear; no nonzero solutions";
            return out;
        }
    }

    // linear constraint (1 + s0) g = z0 on coefficient vectors
    DenseMat<K> sys(nvars, nvars, ctx.zero());
    {
        DenseMat<K> a = r.action_matrix(s0);
        for (unsigned i = 0; i < nvars; ++i)
            for (unsigned j = 0; j < nvars; ++j)
                sys.at(i, j) = (i == j ? ctx.one() : ctx.zero()) + a.at(i, j);
    }
    auto part = solve_linear(sys, detail::coeffs_of_linear(z0, nvars, ctx), ctx);
    if (!part) {
        out.note = "g + s(g) = z has no solution at the base color";
        return out;
    }
    auto hom = kernel_basis(sys, ctx);

    std::vector<Poly<K>> candidates;
    Poly<K> base = detail::linear_from_coeffs(*part, ctx);
    if (hom.empty()) {
        candidates.push_back(base);
    } else if (hom.size() == 1) {
        // g(y) = base + y * dir: every monomial coefficient of d(g) - g^2
        // is a quadratic in y
        Poly<K> dir = detail::linear_from_coeffs(hom[0], ctx);
        Poly<K> c2 = (dir * dir).scaled(ctx.from_int(-1));
        Poly<K> c1 = dR(dir) - (base * dir).scaled(ctx.from_int(2));
        Poly<K> c0 = dR(base) - base * base;
        std::set<Monomial> monos;
        for (const auto& [m, c] : c2.terms()) monos.insert(m);
        for (const auto& [m, c] : c1.terms()) monos.insert(m);
        for (const auto& [m, c] : c0.terms()) monos.insert(m);
        auto cv = [&](const Poly<K>& p, const Monomial& m) {
            const K* c = p.coeff(m);
            return c ? *c : ctx.zero();
        };
        std::optional<std::vector<K>> common;
        for (const auto& m : monos) {
            auto roots = detail::quadratic_roots(cv(c2, m), cv(c1, m), cv(c0, m), ctx);
            if (!roots) continue;
            if (!common) {
                common = roots;
            } else {
                std::vector<K> kept;
                for (const auto& y : *common)
                    if (std::find(roots->begin(), roots->end(), y) != roots->end())
                        kept.push_back(y);
                common = kept;
            }
            if (common->empty()) break;
        }
        if (!common) common = std::vector<K>{ctx.zero()};  // d(g)=g^2 held identically
        for (const auto& y : *common) candidates.push_back(base + dir.scaled(y));
    } else {
        // fall back to finite search over the affine space
        std::vector<K> grid;
        std::int64_t p = ctx.characteristic();
        if constexpr (std::is_same_v<K, Fp>) {
            double total = 1;
            for (std::size_t i = 0; i < hom.size(); ++i) total *= double(p);
            SOERGEL_REQUIRE(total <= 1e6, "solution space too large to enumerate");
            for (std::int64_t t = 0; t < p; ++t) grid.push_back(ctx.from_int(t));
        } else {
            for (int t = -2; t <= 2; ++t) grid.push_back(ctx.from_int(t));
            out.exhaustive = false;
            out.note = "free parameters searched over a finite grid only";
        }
        std::vector<std::size_t> idx(hom.size(), 0);
        while (true) {
            Poly<K> g = base;
            for (std::size_t i = 0; i < hom.size(); ++i)
                g += detail::linear_from_coeffs(hom[i], ctx).scaled(grid[idx[i]]);
            if ((dR(g) - g * g).is_zero()) candidates.push_back(g);
            std::size_t i = 0;
            for (; i < idx.size(); ++i) {
                if (++idx[i] < grid.size()) break;
                idx[i] = 0;
            }
            if (i == idx.size()) break;
        }
    }

    // propagate across the graph and keep the good ones
    std::vector<std::string> seen;
    std::sort(candidates.begin(), candidates.end(),
              [](const Poly<K>& a, const Poly<K>& b) { return a.str() < b.str(); });
    for (const auto& g0 : candidates) {
        if (g0.is_zero()) continue;  // zero entry already present
        if (std::find(seen.begin(), seen.end(), g0.str()) != seen.end()) continue;
        seen.push_back(g0.str());

        std::vector<Poly<K>> g(r.rank());
        std::vector<bool> have(r.rank(), false);
        g[s0] = g0;
        have[s0] = true;
        std::vector<Gen> queue{s0};
        while (!queue.empty()) {
            Gen a = queue.back();
            queue.pop_back();
            for (Gen b : r.graph().neighbors(a)) {
                if (have[b]) continue;
                g[b] = r.act_group({a, b}, g[a]);
                have[b] = true;
                queue.push_back(b);
            }
        }
        std::vector<Poly<K>> gbar;
        for (unsigned s = 0; s < r.rank(); ++s) gbar.push_back(r.act_gen(Gen(s), g[s]));

        PotentialDifferential<K> pd(r, dR, g, gbar, PdMode::relaxed);
        if (!pd.check_potential().pass()) continue;
        if (!check_good(pd).good) continue;
        out.solutions.emplace_back(r, dR, std::move(g), std::move(gbar), PdMode::strict);
    }
    return out;
}

}  // namespace soergel
