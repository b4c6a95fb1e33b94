#pragma once

// divided-powers: checks that d^(k) = d^k / k! stays inside the integral
// form on dots, trivalent vertices, boxes and their composites, pins the
// closed forms where the differential squares its own potential, and over a
// prime field checks d^p = 0 on the same samples.

#include <random>

#include "cli_common.hpp"
#include "soergel/diagram.hpp"

namespace soergel::cli {

template <class K>
Report cmd_divided_powers(const RunConfig& cfg, const Common& opt, RingCtx<K> ctx) {
    Report rep;
    rep.command = "divided-powers";
    echo_inputs(rep, opt);

    Realization<K> r = cfg.realization(ctx);
    PotentialDifferential<K> pd = cfg.differential(r);
    Diagrams<K> D(r.graph(), ctx);
    GoodVerdict<K> verdict = check_good(pd);

    const std::int64_t p = ctx.characteristic();
    unsigned kmax = cfg.cap("max_power", 8);
    // over F_p division by k! only makes sense below the prime
    unsigned kdiv = p > 0 ? std::min<unsigned>(kmax, unsigned(p) - 1) : kmax;

    unsigned ncolors = std::min(r.rank(), 2u);
    std::mt19937_64 rng(opt.seed);

    auto random_linear = [&]() {
        std::uniform_int_distribution<int> c(-3, 3);
        Poly<K> f;
        for (unsigned i = 1; i <= r.nvars(); ++i)
            f += r.var(i).scaled(ctx.from_int(c(rng)));
        if (f.is_zero()) f = r.var(1);
        return f;
    };

    // named sample morphisms; composites exercise the Leibniz bookkeeping
    std::vector<std::pair<std::string, MorphismSum<K>>> samples;
    for (unsigned s = 0; s < ncolors; ++s) {
        std::string cs = std::to_string(s);
        samples.emplace_back("enddot(" + cs + ")", D.enddot(Gen(s)));
        samples.emplace_back("startdot(" + cs + ")", D.startdot(Gen(s)));
        samples.emplace_back("split(" + cs + ")", D.split(Gen(s)));
        samples.emplace_back("merge(" + cs + ")", D.merge(Gen(s)));
    }
    samples.emplace_back("barbell(0)", D.barbell(0));
    samples.emplace_back("brk(0)", D.brk(0));
    samples.emplace_back("cup(0)", D.cup(0));
    samples.emplace_back("cap(0)", D.cap(0));
    samples.emplace_back("split(0) ; merge(0)", D.compose_v(D.merge(0), D.split(0)));
    samples.emplace_back("merge(0) ; split(0)", D.compose_v(D.split(0), D.merge(0)));
    if (r.rank() >= 2) {
        samples.emplace_back("enddot(0) | startdot(1)",
                             D.compose_h(D.enddot(0), D.startdot(1)));
        samples.emplace_back("cup(0) | cap(1)", D.compose_h(D.cup(0), D.cap(1)));
        samples.emplace_back("seeded box between two strands",
                             D.box_slice(D.w({0, 1}), 1, random_linear()));
    }
    samples.emplace_back("seeded box alone", D.polybox(random_linear()));

    {
        auto& sec = rep.section("integrality of d^(k) on sample morphisms, k <= " +
                                std::to_string(kdiv));
        for (const auto& [name, m] : samples) {
            bool ok = true;
            std::string detail;
            for (unsigned k = 2; k <= kdiv && ok; ++k) {
                try {
                    auto dp = divided_power_morphism(pd, m, k);
                    (void)dp;
                } catch (const Error& e) {
                    ok = false;
                    detail = std::string("k = ") + std::to_string(k) + ": " + e.what();
                }
            }
            sec.check(name, ok, detail);
        }
    }

    if (verdict.good) {
        auto& sec = rep.section("closed forms when the potential squares");
        for (unsigned s = 0; s < ncolors; ++s) {
            std::string cs = std::to_string(s);
            Poly<K> gk = pd.g(Gen(s));
            bool ok = true;
            std::string detail;
            for (unsigned k = 2; k <= kdiv; ++k) {
                gk *= pd.g(Gen(s));
                auto lhs = divided_power_morphism(pd, D.enddot(Gen(s)), k);
                auto rhs = D.compose_v(D.box_slice({}, 0, gk), D.enddot(Gen(s)));
                if (lhs != rhs) {
                    ok = false;
                    detail = "k = " + std::to_string(k);
                    break;
                }
            }
            sec.check("d^(k) enddot(" + cs + ") = g^k enddot(" + cs + ")", ok, detail);
            sec.check("d^(2) split(" + cs + ") = 0",
                      kdiv < 2 || divided_power_morphism(pd, D.split(Gen(s)), 2).is_zero());
            sec.check("d^(2) merge(" + cs + ") = 0",
                      kdiv < 2 || divided_power_morphism(pd, D.merge(Gen(s)), 2).is_zero());
        }
    }

    {
        Poly<K> x1 = r.var(1);
        if (pd.ring_differential()(x1) == x1 * x1) {
            auto& sec = rep.section("binomial ladder on boxes");
            for (unsigned l = 1; l <= 3; ++l) {
                bool ok = true;
                std::string detail;
                Poly<K> xl = x1;
                for (unsigned i = 1; i < l; ++i) xl *= x1;
                for (unsigned k = 2; k <= kdiv; ++k) {
                    Poly<K> xlk = xl;
                    for (unsigned i = 0; i < k; ++i) xlk *= x1;
                    K coeff = ctx.from_int(
                        binomial(Int(l + k - 1), k).template convert_to<std::int64_t>());
                    auto lhs = divided_power_morphism(pd, D.polybox(xl), k);
                    auto rhs = D.polybox(xlk).scaled(coeff);
                    if (lhs != rhs) {
                        ok = false;
                        detail = "k = " + std::to_string(k);
                        break;
                    }
                }
                sec.check("d^(k) [x1^" + std::to_string(l) + "] = C(l+k-1,k) [x1^(l+k)]", ok,
                          detail);
            }
        }
    }

    if (p > 0) {
        auto& sec = rep.section("d^p = 0 over F_" + std::to_string(p));
        for (const auto& [name, m] : samples) {
            auto it = derive_iter(pd, m, unsigned(p));
            sec.check(name, it.is_zero(),
                      it.is_zero() ? "" : "surviving terms: " + std::to_string(it.term_count()));
        }
    }

    return rep;
}

} // namespace soergel::cli
