#include <catch2/catch_amalgamated.hpp>

#include "soergel/derivation.hpp"
#include "soergel/realization.hpp"

#include "test_util.hpp"

using namespace soergel;

namespace {
RingCtx<Rat> Q;
Poly<Rat> qp(const std::string& s) { return parse_poly<Rat>(s, Q); }
} // namespace

TEST_CASE("standard type A realization") {
    auto r = Realization<Rat>::standard_type_a(4, Q);
    CHECK(r.rank() == 3);
    CHECK(r.nvars() == 4);
    CHECK(r.root(0) == qp("x1 - x2"));

    SECTION("action convention: letters apply first to last") {
        CHECK(r.act({0}, qp("x1")) == qp("x2"));
        CHECK(r.act({0, 1}, qp("x1")) == qp("x3"));
        CHECK(r.act_gen(1, qp("x2")) == qp("x3"));
        for (Gen s = 0; s < 3; ++s) CHECK(r.act_gen(s, r.root(s)) == -r.root(s));
        // group products act rightmost first: (st)(f) = s(t(f))
        CHECK(r.act_group({0, 1}, qp("x1")) == qp("x2"));
        CHECK(r.act_group({1, 0}, qp("x1")) == qp("x3"));
        CHECK_THROWS_AS(r.act({7}, qp("x1")), Error);
    }

    SECTION("demazure operators") {
        CHECK(r.demazure(0, qp("x1")) == qp("1"));
        CHECK(r.demazure(0, r.root(0)) == qp("2"));
        CHECK(r.demazure(0, qp("x1 + x2")).is_zero());
        CHECK(r.demazure(1, qp("x1")).is_zero());
        CHECK(r.demazure(0, qp("x1^2")) == qp("x1 + x2"));

        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            Poly<Rat> f = testutil::random_poly<Rat>(rng, Q, 4, 3);
            Poly<Rat> g = testutil::random_poly<Rat>(rng, Q, 4, 3);
            Gen s = Gen(trial % 3);
            CHECK(r.demazure(s, f * g) ==
                  r.demazure(s, f) * g + r.act_gen(s, f) * r.demazure(s, g));
            CHECK(r.act_gen(s, r.act_gen(s, f)) == f);
            CHECK(r.act_gen(s, f * g) == r.act_gen(s, f) * r.act_gen(s, g));
            CHECK(r.demazure(s, r.demazure(s, f)).is_zero());
        }
    }

    SECTION("invariant decomposition") {
        auto [a0, b0] = r.decompose_invariant(0, qp("x1"));
        CHECK(a0.is_zero());
        CHECK(b0 == qp("1"));
        auto [a1, b1] = r.decompose_invariant(0, qp("7"));
        CHECK(a1 == qp("7"));
        CHECK(b1.is_zero());
        auto [a2, b2] = r.decompose_invariant(0, r.root(0));
        CHECK(a2 == r.root(0) - qp("2*x1"));
        CHECK(b2 == qp("2"));
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 8; ++trial) {
            Poly<Rat> f = testutil::random_poly<Rat>(rng, Q, 4, 3);
            Gen s = Gen(trial % 3);
            auto [a, b] = r.decompose_invariant(s, f);
            CHECK(a + b * r.omega(s) == f);
            CHECK(r.demazure(s, a).is_zero());
            CHECK(r.demazure(s, b).is_zero());
        }
    }

    SECTION("validation passes") {
        auto rep = r.validate();
        CAPTURE(rep.first_failure() ? rep.first_failure()->name + ": " + rep.first_failure()->witness
                                    : std::string("ok"));
        CHECK(rep.pass());
    }

    SECTION("standard differential commutes with the group action") {
        std::vector<Poly<Rat>> imgs;
        for (unsigned i = 1; i <= 4; ++i) imgs.push_back(qp("x" + std::to_string(i) + "^2"));
        RingDerivation<Rat> d(std::move(imgs), Q);
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 8; ++trial) {
            Poly<Rat> f = testutil::random_poly<Rat>(rng, Q, 4, 3);
            Word w = {Gen(trial % 3), Gen((trial + 1) % 3)};
            CHECK(d.derive(r.act(w, f)) == r.act(w, d.derive(f)));
        }
        // derive of demazure: d(ds(f)) = ds(d(f)) - z_s ds(f) with z_s = x_i + x_{i+1}
        for (int trial = 0; trial < 8; ++trial) {
            Poly<Rat> f = testutil::random_poly<Rat>(rng, Q, 4, 3);
            Gen s = Gen(trial % 3);
            Poly<Rat> zs = qp("x" + std::to_string(s + 1)) + qp("x" + std::to_string(s + 2));
            CHECK(d.derive(r.demazure(s, f)) ==
                  r.demazure(s, d.derive(f)) - zs * r.demazure(s, f));
        }
    }

    SECTION("json round trip") {
        Json j = r.to_json();
        auto r2 = Realization<Rat>::from_json(j, Q);
        CHECK(r2.rank() == 3);
        CHECK(r2.graph().adjacent(0, 1));
        CHECK(!r2.graph().adjacent(0, 2));
        CHECK(r2.root(2) == r.root(2));
        CHECK(r2.validate().pass());
    }
}

TEST_CASE("D4 star realization") {
    auto r = Realization<Rat>::standard_d4(Q);
    CHECK(r.graph().adjacent(1, 0));
    CHECK(r.graph().adjacent(1, 2));
    CHECK(r.graph().adjacent(1, 3));
    CHECK(!r.graph().adjacent(0, 3));
    CHECK(!r.graph().adjacent(2, 3));
    CHECK(r.act_gen(3, qp("x3")) == qp("-x4"));
    auto rep = r.validate();
    CAPTURE(rep.first_failure() ? rep.first_failure()->name + ": " + rep.first_failure()->witness
                                : std::string("ok"));
    CHECK(rep.pass());
}

TEST_CASE("reflection representation quotient") {
    SECTION("characteristic zero") {
        auto r = Realization<Rat>::type_a_quotient(4, Q);
        CHECK(r.nvars() == 3);
        CHECK(r.act_gen(2, qp("x3")) == qp("-x1 - x2 - x3"));
        CHECK(r.validate().pass());
    }
    SECTION("characteristic two") {
        RingCtx<Fp> f2(2);
        auto r = Realization<Fp>::type_a_quotient(4, f2);
        auto rep = r.validate();
        CAPTURE(rep.first_failure() ? rep.first_failure()->name + ": " + rep.first_failure()->witness
                                    : std::string("ok"));
        CHECK(rep.pass());
        CHECK(rep.warn_char2_quotient);
    }
    SECTION("omega = alpha fails Demazure surjectivity in characteristic 2") {
        RingCtx<Fp> f2(2);
        auto base = Realization<Fp>::standard_type_a(3, f2);
        std::vector<Poly<Fp>> roots = {base.root(0), base.root(1)};
        std::vector<std::vector<Poly<Fp>>> action;
        for (Gen s = 0; s < 2; ++s) {
            std::vector<Poly<Fp>> imgs;
            for (unsigned i = 1; i <= 3; ++i) imgs.push_back(base.act_gen(s, base.var(i)));
            action.push_back(std::move(imgs));
        }
        Realization<Fp> bad(CoxeterGraph::type_a(2), 3, f2, roots, roots, std::move(action));
        auto rep = bad.validate();
        CHECK(!rep.pass());
        CHECK(rep.first_failure()->name == "demazure_surjectivity");
    }
}

TEST_CASE("orientation census") {
    auto paths = consistent_orientations(CoxeterGraph::type_a(4)); // A4 path, 3 edges
    CHECK(paths.size() == 2);
    auto single = consistent_orientations(CoxeterGraph::type_a(2));
    CHECK(single.size() == 2);
    auto d4 = consistent_orientations(CoxeterGraph::star_d4());
    CHECK(d4.empty());
    for (unsigned n = 3; n <= 5; ++n) {
        auto cyc = consistent_orientations(CoxeterGraph::cycle(n));
        CHECK(cyc.size() == 2); // the two rotational orientations
    }
    // any vertex of degree 3 makes some 2-path middle a source or sink
    CoxeterGraph tree(6);
    tree.add_edge(0, 1);
    tree.add_edge(1, 2);
    tree.add_edge(2, 3);
    tree.add_edge(2, 4);
    tree.add_edge(4, 5);
    CHECK(consistent_orientations(tree).empty());
    // on a path every consistent orientation flows through each middle vertex
    auto sols = consistent_orientations(CoxeterGraph::type_a(5));
    REQUIRE(sols.size() == 2);
    for (auto& o : sols) {
        for (Gen m = 1; m + 1 < 5; ++m) {
            unsigned in = 0, out = 0;
            for (Gen v = 0; v < 5; ++v) {
                if (o.has_edge(v, m)) ++in;
                if (o.has_edge(m, v)) ++out;
            }
            CHECK(in == 1);
            CHECK(out == 1);
        }
    }
}

TEST_CASE("word utilities") {
    CHECK(word_to_perm(4, {0, 0}) == Perm::identity(4));
    CHECK(!is_reduced(4, {0, 0}));
    CHECK(word_to_perm(4, {0, 1, 0}) == word_to_perm(4, {1, 0, 1}));
    CHECK(is_reduced(4, {0, 1, 0}));
    CHECK(enumerate_sn(4).size() == 24);
    // left-to-right convention pins the composite: s1 then s2 sends 0 to 2
    CHECK(word_to_perm(3, {0, 1}).p[0] == 2);
}
