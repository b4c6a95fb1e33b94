#pragma once

#include <json.hpp>

#include "soergel/coxeter.hpp"
#include "soergel/matrixk.hpp"
#include "soergel/poly.hpp"

namespace soergel {

using Json = nlohmann::ordered_json;

struct ValidationCheck {
    std::string name;
    bool pass = false;
    std::string witness; // empty on pass
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool warn_char2_quotient = false;

    bool pass() const {
        for (auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    const ValidationCheck* first_failure() const {
        for (auto& c : checks)
            if (!c.pass) return &c;
        return nullptr;
    }
};

// A realization: the graded ring R = K[x_1..x_n], a linear action of each
// simple reflection, a root alpha_s, and a Demazure witness omega_s with
// demazure(s, omega_s) = 1. The Coxeter graph is derived from the action.
template <class K>
class Realization {
  public:
    Realization() = default;
    Realization(CoxeterGraph graph, unsigned nvars, RingCtx<K> ctx,
                std::vector<Poly<K>> roots, std::vector<Poly<K>> omegas,
                std::vector<std::vector<Poly<K>>> action)
        : graph_(std::move(graph)), nvars_(nvars), ctx_(ctx), roots_(std::move(roots)),
          omegas_(std::move(omegas)), action_(std::move(action)) {
        SOERGEL_REQUIRE(roots_.size() == graph_.rank() && omegas_.size() == graph_.rank() &&
                            action_.size() == graph_.rank(),
                        "Realization: per-generator data sizes disagree with rank ", graph_.rank());
        for (auto& img : action_)
            SOERGEL_REQUIRE(img.size() == nvars_, "Realization: action image count != variable count");
    }

    const CoxeterGraph& graph() const { return graph_; }
    unsigned rank() const { return graph_.rank(); }
    unsigned nvars() const { return nvars_; }
    RingCtx<K> ctx() const { return ctx_; }
    K one() const { return ctx_.one(); }

    const Poly<K>& root(Gen s) const { return roots_.at(s); }
    const Poly<K>& omega(Gen s) const { return omegas_.at(s); }
    Poly<K> var(unsigned i) const { return Poly<K>(Monomial::var(i), ctx_.one()); }
    Poly<K> constant(std::int64_t c) const { return Poly<K>(ctx_.from_int(c)); }

    Poly<K> act_gen(Gen s, const Poly<K>& f) const {
        SOERGEL_REQUIRE(s < rank(), "act: unknown generator s", unsigned(s) + 1);
        return f.substitute(action_[s], ctx_.one());
    }
    // letters apply first to last: act({s,t}, f) = t(s(f))
    Poly<K> act(const Word& w, const Poly<K>& f) const {
        Poly<K> g = f;
        for (Gen s : w) g = act_gen(s, g);
        return g;
    }
    // group element as product of letters acting on the argument:
    // act_group({s,t}, f) = s(t(f))
    Poly<K> act_group(const Word& w, const Poly<K>& f) const {
        Poly<K> g = f;
        for (auto it = w.rbegin(); it != w.rend(); ++it) g = act_gen(*it, g);
        return g;
    }

    Poly<K> demazure(Gen s, const Poly<K>& f) const {
        Poly<K> diff = f - act_gen(s, f);
        auto dr = divide(diff, roots_.at(s));
        SOERGEL_REQUIRE(dr.exact, "demazure: f - s(f) not divisible by alpha_s (corrupted realization), s",
                        unsigned(s) + 1, ", remainder ", dr.rem.str());
        return dr.quot;
    }

    // f = a + b*omega_s with a, b invariant; b = demazure(s, f)
    std::pair<Poly<K>, Poly<K>> decompose_invariant(Gen s, const Poly<K>& f) const {
        Poly<K> b = demazure(s, f);
        Poly<K> a = f - b * omegas_.at(s);
        return {std::move(a), std::move(b)};
    }

    // coefficient-vector matrix of s acting on linear forms; column i holds
    // the coefficients of act(s, x_{i+1})
    DenseMat<K> action_matrix(Gen s) const {
        DenseMat<K> m(nvars_, nvars_, ctx_.zero());
        for (unsigned i = 0; i < nvars_; ++i) {
            const Poly<K>& img = action_[s][i];
            for (const auto& [mono, c] : img.terms()) {
                SOERGEL_REQUIRE(mono.total_degree() == 1, "action image not linear");
                for (unsigned j = 0; j < mono.e.size(); ++j)
                    if (mono.e[j]) m.at(j, i) = c;
            }
        }
        return m;
    }

    ValidationReport validate() const;

    Json to_json() const {
        Json j;
        j["schema"] = "realization/1";
        j["variables"] = nvars_;
        Json gens = Json::array();
        for (Gen s = 0; s < rank(); ++s) {
            Json g;
            g["name"] = "s" + std::to_string(unsigned(s) + 1);
            g["root"] = roots_[s].str();
            g["omega"] = omegas_[s].str();
            Json imgs = Json::array();
            for (auto& p : action_[s]) imgs.push_back(p.str());
            g["action"] = imgs;
            gens.push_back(g);
        }
        j["generators"] = gens;
        return j;
    }

    static Realization from_json(const Json& j, RingCtx<K> ctx) {
        SOERGEL_REQUIRE(j.value("schema", "") == "realization/1",
                        "realization config: missing or unknown schema tag");
        unsigned nvars = j.at("variables").get<unsigned>();
        const Json& gens = j.at("generators");
        unsigned rank = static_cast<unsigned>(gens.size());
        std::vector<Poly<K>> roots, omegas;
        std::vector<std::vector<Poly<K>>> action;
        for (auto& g : gens) {
            roots.push_back(parse_poly<K>(g.at("root").get<std::string>(), ctx));
            omegas.push_back(parse_poly<K>(g.at("omega").get<std::string>(), ctx));
            std::vector<Poly<K>> imgs;
            for (auto& s : g.at("action")) imgs.push_back(parse_poly<K>(s.get<std::string>(), ctx));
            SOERGEL_REQUIRE(imgs.size() == nvars, "realization config: action image count mismatch");
            action.push_back(std::move(imgs));
        }
        CoxeterGraph graph = derive_graph(rank, nvars, action, ctx);
        return Realization(std::move(graph), nvars, ctx, std::move(roots), std::move(omegas),
                           std::move(action));
    }

    // m_st read off from the order of the composite action on variables
    static CoxeterGraph derive_graph(unsigned rank, unsigned nvars,
                                     const std::vector<std::vector<Poly<K>>>& action, RingCtx<K> ctx) {
        CoxeterGraph g(rank);
        auto compose = [&](const std::vector<Poly<K>>& f, const std::vector<Poly<K>>& h) {
            // image of x_i under "first h, then f"... composition of
            // substitutions: (f after h)(x_i) = h(x_i) with f applied
            std::vector<Poly<K>> out;
            for (unsigned i = 0; i < nvars; ++i) out.push_back(h[i].substitute(f, ctx.one()));
            return out;
        };
        auto is_id = [&](const std::vector<Poly<K>>& f) {
            for (unsigned i = 0; i < nvars; ++i)
                if (f[i] != Poly<K>(Monomial::var(i + 1), ctx.one())) return false;
            return true;
        };
        for (Gen s = 0; s < rank; ++s)
            for (Gen t = s + 1; t < rank; ++t) {
                auto st = compose(action[s], action[t]);
                auto stst = compose(st, st);
                if (is_id(stst)) continue; // m = 2
                auto ststst = compose(stst, st);
                SOERGEL_REQUIRE(is_id(ststst), "realization: action of (s", unsigned(s) + 1, " s",
                                unsigned(t) + 1, ") has order > 3, not simply-laced");
                g.add_edge(s, t);
            }
        return g;
    }

    static Realization standard_type_a(unsigned n, RingCtx<K> ctx) {
        SOERGEL_REQUIRE(n >= 2, "standard_type_a: need n >= 2");
        CoxeterGraph g = CoxeterGraph::type_a(n - 1);
        std::vector<Poly<K>> roots, omegas;
        std::vector<std::vector<Poly<K>>> action;
        K one = ctx.one();
        for (unsigned i = 0; i + 1 < n; ++i) {
            roots.push_back(Poly<K>(Monomial::var(i + 1), one) - Poly<K>(Monomial::var(i + 2), one));
            omegas.push_back(Poly<K>(Monomial::var(i + 1), one));
            std::vector<Poly<K>> imgs;
            for (unsigned j = 1; j <= n; ++j) {
                unsigned im = j == i + 1 ? i + 2 : (j == i + 2 ? i + 1 : j);
                imgs.push_back(Poly<K>(Monomial::var(im), one));
            }
            action.push_back(std::move(imgs));
        }
        return Realization(std::move(g), n, ctx, std::move(roots), std::move(omegas), std::move(action));
    }

    // D4 star: s2 is the center; alpha_4 = x3 + x4 with s4: x3 <-> -x4
    static Realization standard_d4(RingCtx<K> ctx) {
        Realization a4 = standard_type_a(4, ctx);
        CoxeterGraph g = CoxeterGraph::star_d4();
        K one = ctx.one();
        std::vector<Poly<K>> roots, omegas;
        std::vector<std::vector<Poly<K>>> action;
        for (Gen s = 0; s < 3; ++s) {
            roots.push_back(a4.root(s));
            omegas.push_back(a4.omega(s));
            action.push_back(a4.action_[s]);
        }
        roots.push_back(Poly<K>(Monomial::var(3), one) + Poly<K>(Monomial::var(4), one));
        omegas.push_back(Poly<K>(Monomial::var(3), one));
        std::vector<Poly<K>> imgs;
        imgs.push_back(Poly<K>(Monomial::var(1), one));
        imgs.push_back(Poly<K>(Monomial::var(2), one));
        imgs.push_back(-Poly<K>(Monomial::var(4), one));
        imgs.push_back(-Poly<K>(Monomial::var(3), one));
        action.push_back(std::move(imgs));
        return Realization(std::move(g), 4, ctx, std::move(roots), std::move(omegas), std::move(action));
    }

    // (n-1)-variable quotient by e_1: x_n is replaced by -(x_1+...+x_{n-1}).
    // Over F_2 this is the e_1-quotient realization.
    static Realization type_a_quotient(unsigned n, RingCtx<K> ctx) {
        SOERGEL_REQUIRE(n >= 3, "type_a_quotient: need n >= 3");
        unsigned nv = n - 1;
        K one = ctx.one();
        Poly<K> last; // image of the missing x_n
        for (unsigned j = 1; j <= nv; ++j) last -= Poly<K>(Monomial::var(j), one);
        auto xi = [&](unsigned j) {
            return j <= nv ? Poly<K>(Monomial::var(j), one) : last;
        };
        CoxeterGraph g = CoxeterGraph::type_a(n - 1);
        std::vector<Poly<K>> roots, omegas;
        std::vector<std::vector<Poly<K>>> action;
        for (unsigned i = 0; i + 1 < n; ++i) {
            roots.push_back(xi(i + 1) - xi(i + 2));
            omegas.push_back(xi(i + 1));
            std::vector<Poly<K>> imgs;
            for (unsigned j = 1; j <= nv; ++j) {
                unsigned im = j == i + 1 ? i + 2 : (j == i + 2 ? i + 1 : j);
                imgs.push_back(xi(im));
            }
            action.push_back(std::move(imgs));
        }
        return Realization(std::move(g), nv, ctx, std::move(roots), std::move(omegas), std::move(action));
    }

    // the localization faithfulness caveat is flagged downstream in char 2
    bool is_char2() const { return ctx_.characteristic() == 2; }

    bool star_pair(Gen s, Gen t) const;

  private:
    CoxeterGraph graph_;
    unsigned nvars_ = 0;
    RingCtx<K> ctx_;
    std::vector<Poly<K>> roots_;
    std::vector<Poly<K>> omegas_;
    std::vector<std::vector<Poly<K>>> action_;
};

template <class K>
ValidationReport Realization<K>::validate() const {
    ValidationReport rep;
    auto add = [&](const std::string& name, bool pass, std::string witness = "") {
        rep.checks.push_back({name, pass, pass ? "" : std::move(witness)});
    };

    {
        bool ok = true;
        std::string w;
        for (Gen s = 0; s < rank() && ok; ++s) {
            if (roots_[s].is_zero() || roots_[s].graded_degree() != std::optional<int>(2) ||
                !roots_[s].is_homogeneous()) {
                ok = false;
                w = "alpha_s" + std::to_string(unsigned(s) + 1) + " = " + roots_[s].str();
            }
            for (unsigned i = 0; i < nvars_ && ok; ++i) {
                const auto& img = action_[s][i];
                if (img.is_zero() || !img.is_homogeneous() || img.graded_degree() != std::optional<int>(2)) {
                    ok = false;
                    w = "act(s" + std::to_string(unsigned(s) + 1) + ", x" + std::to_string(i + 1) +
                        ") = " + img.str();
                }
            }
        }
        add("linear_data", ok, w);
        if (!ok) return rep; // nothing else is meaningful
    }

    {
        bool ok = true;
        std::string w;
        for (Gen s = 0; s < rank() && ok; ++s)
            for (unsigned i = 1; i <= nvars_ && ok; ++i) {
                Poly<K> twice = act_gen(s, act_gen(s, var(i)));
                if (twice != var(i)) {
                    ok = false;
                    w = "s" + std::to_string(unsigned(s) + 1) + " applied twice moves x" +
                        std::to_string(i);
                }
            }
        add("involution", ok, w);
    }

    {
        bool ok = true;
        std::string w;
        for (Gen s = 0; s < rank() && ok; ++s)
            for (Gen t = s + 1; t < rank() && ok; ++t) {
                Word lhs, rhs;
                if (graph_.adjacent(s, t)) {
                    lhs = {s, t, s};
                    rhs = {t, s, t};
                } else {
                    lhs = {s, t};
                    rhs = {t, s};
                }
                for (unsigned i = 1; i <= nvars_ && ok; ++i)
                    if (act(lhs, var(i)) != act(rhs, var(i))) {
                        ok = false;
                        w = "braid/commutation fails on (s" + std::to_string(unsigned(s) + 1) + ",s" +
                            std::to_string(unsigned(t) + 1) + ") at x" + std::to_string(i);
                    }
            }
        add("braid_relations", ok, w);
    }

    {
        bool ok = true;
        std::string w;
        for (Gen s = 0; s < rank() && ok; ++s)
            if (act_gen(s, roots_[s]) != -roots_[s]) {
                ok = false;
                w = "s(alpha_s) != -alpha_s for s" + std::to_string(unsigned(s) + 1);
            }
        add("root_reflection", ok, w);
    }

    {
        bool ok = true;
        std::string w;
        for (Gen s = 0; s < rank() && ok; ++s) {
            Poly<K> diff = omegas_[s] - act_gen(s, omegas_[s]);
            auto dr = divide(diff, roots_[s]);
            if (!dr.exact || dr.quot != Poly<K>(ctx_.one())) {
                ok = false;
                w = "demazure(s" + std::to_string(unsigned(s) + 1) + ", omega) = " +
                    (dr.exact ? dr.quot.str() : "not defined (inexact division)");
            }
        }
        add("demazure_surjectivity", ok, w);
    }

    {
        bool ok = true;
        std::string w;
        for (Gen s = 0; s < rank() && ok; ++s)
            for (Gen t = 0; t < rank() && ok; ++t) {
                if (s == t) continue;
                Poly<K> v = demazure(s, roots_[t]);
                Poly<K> want = graph_.adjacent(s, t) ? constant(-1) : constant(0);
                if (v != want) {
                    ok = false;
                    w = "demazure(s" + std::to_string(unsigned(s) + 1) + ", alpha_s" +
                        std::to_string(unsigned(t) + 1) + ") = " + v.str() + ", expected " + want.str();
                }
            }
        add("cartan_entries", ok, w);
    }

    {
        // (*): linear fixed forms of s and of t jointly span all linear forms
        bool ok = true;
        std::string w;
        for (Gen s = 0; s < rank() && ok; ++s)
            for (Gen t = s + 1; t < rank() && ok; ++t) {
                if (!star_pair(s, t)) {
                    ok = false;
                    w = "pair (s" + std::to_string(unsigned(s) + 1) + ",s" +
                        std::to_string(unsigned(t) + 1) + ")";
                }
            }
        add("star_spanning", ok, w);
    }

    rep.warn_char2_quotient = is_char2();
    return rep;
}

namespace detail {
template <class K>
std::vector<std::vector<K>> fixed_linear_forms(const DenseMat<K>& a, RingCtx<K> ctx) {
    DenseMat<K> m = a;
    for (unsigned i = 0; i < m.rows; ++i) m.at(i, i) = m.at(i, i) - ctx.one();
    return kernel_basis(std::move(m), ctx);
}

inline std::vector<std::vector<Int>> clear_denominators(const std::vector<std::vector<Rat>>& vs) {
    std::vector<std::vector<Int>> out;
    for (auto& v : vs) {
        Int l = 1;
        for (auto& x : v) l = boost::multiprecision::lcm(l, denominator(x));
        std::vector<Int> w;
        for (auto& x : v) w.push_back(numerator(x) * (l / denominator(x)));
        out.push_back(std::move(w));
    }
    return out;
}
} // namespace detail

template <class K>
bool Realization<K>::star_pair(Gen s, Gen t) const {
    if constexpr (std::is_same_v<K, Int>) {
        // spanning over Z: rational kernels cleared to integer vectors, then
        // a lattice test; the fixed spaces of our integral actions have
        // unimodular echelon bases so clearing denominators is lossless
        RingCtx<Rat> qctx;
        auto lift = [&](Gen g) {
            DenseMat<K> a = action_matrix(g);
            DenseMat<Rat> aq(a.rows, a.cols, Rat(0));
            for (unsigned i = 0; i < a.rows; ++i)
                for (unsigned j = 0; j < a.cols; ++j) aq.at(i, j) = Rat(a.at(i, j));
            return detail::fixed_linear_forms(aq, qctx);
        };
        auto fs = lift(s), ft = lift(t);
        for (auto& v : ft) fs.push_back(v);
        return spans_integer_lattice(detail::clear_denominators(fs), nvars_);
    } else {
        auto fs = detail::fixed_linear_forms(action_matrix(s), ctx_);
        auto ft = detail::fixed_linear_forms(action_matrix(t), ctx_);
        DenseMat<K> m(nvars_, static_cast<unsigned>(fs.size() + ft.size()), ctx_.zero());
        unsigned c = 0;
        for (auto& v : fs) {
            for (unsigned i = 0; i < nvars_; ++i) m.at(i, c) = v[i];
            ++c;
        }
        for (auto& v : ft) {
            for (unsigned i = 0; i < nvars_; ++i) m.at(i, c) = v[i];
            ++c;
        }
        return mat_rank(std::move(m)) == nvars_;
    }
}

} // namespace soergel
