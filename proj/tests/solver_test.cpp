#include "doctest.h"

#include "tst/examples.hpp"
#include "tst/solver.hpp"
#include "test_util.hpp"

using namespace tst;
using namespace tstest;

namespace {
std::string yb(std::initializer_list<int> syms) {
    std::string s;
    for (int v : syms) s.push_back(static_cast<char>(v));
    return s;
}
}  // namespace

TEST_CASE("worked instance: g-indices") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    StoppingTree<Rat> full = complete_tree(m, rule);
    CHECK(g_index(full, yb({1})) == GValue(Rat(3)));
    CHECK(g_index(full, yb({0})) == GValue(Rat(1, 3)));
    CHECK(g_index(full, "") == GValue(Rat(1, 2)));
    CHECK_THROWS_AS(g_index(full, yb({1, 0})), std::invalid_argument);  // leaf
    CHECK_THROWS_AS(g_index(full, yb({0, 0, 1})), std::invalid_argument);  // absent
}

TEST_CASE("worked instance: optimal subtrees across the multiplier range") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    StoppingTree<Rat> full = complete_tree(m, rule);
    StoppingTree<Rat> fig3 = prune_at(full, {yb({1})});
    StoppingTree<Rat> two = prune_at(full, {yb({0}), yb({1})});
    StoppingTree<Rat> triv = trivial_tree<Rat>(2);

    CHECK(trees_equal(optimal_subtree(full, GValue(Rat(4))), full));
    CHECK(trees_equal(optimal_subtree(full, GValue(Rat(3))), fig3));  // tie stops
    CHECK(trees_equal(optimal_subtree(full, GValue(Rat(1))), fig3));
    CHECK(trees_equal(optimal_subtree(full, GValue(Rat(1, 3))), two));  // tie stops
    CHECK(trees_equal(optimal_subtree(full, GValue(Rat(1, 4))), two));
    CHECK(trees_equal(optimal_subtree(full, GValue(Rat(0))), triv));
    // lambda = inf: no live node has a = 0, so nothing can be pruned for free
    CHECK(trees_equal(optimal_subtree(full, GValue::infinity()), full));
    CHECK_THROWS_AS(optimal_subtree(full, GValue(Rat(-1))), std::invalid_argument);

    // costs at the optimum are the lower envelope of the J_lambda lines
    CHECK(cost(optimal_subtree(full, GValue(Rat(1))), GValue(Rat(1))) == GValue(Rat(1, 4)));
    CHECK(cost(optimal_subtree(full, GValue(Rat(4))), GValue(Rat(4))) == GValue(Rat(1, 2)));
}

TEST_CASE("worked instance: breakpoint sweep") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
    REQUIRE(c.M() == 2);

    CHECK(c.entries[0].lambda.is_inf());
    CHECK(c.entries[0].alpha == Rat(0));
    CHECK(c.entries[0].delay == Rat(1, 2));
    CHECK(c.entries[1].lambda == GValue(Rat(3)));
    CHECK(c.entries[1].alpha == Rat(1, 8));
    CHECK(c.entries[1].delay == Rat(1, 8));
    CHECK(c.entries[2].lambda == GValue(Rat(1, 3)));
    CHECK(c.entries[2].alpha == Rat(1, 2));
    CHECK(c.entries[2].delay == Rat(0));

    StoppingTree<Rat> full = complete_tree(m, rule);
    CHECK(trees_equal(c.entries[0].tree, full));
    CHECK(trees_equal(c.entries[1].tree, prune_at(full, {yb({1})})));
    CHECK(trees_equal(c.entries[2].tree, prune_at(full, {yb({0}), yb({1})})));
    CHECK(trees_equal(c.terminal, trivial_tree<Rat>(2)));

    auto v = c.vertices();
    REQUIRE(v.size() == 3);
    CHECK(v[0] == std::make_pair(Rat(0), Rat(1, 2)));
    CHECK(v[1] == std::make_pair(Rat(1, 8), Rat(1, 8)));
    CHECK(v[2] == std::make_pair(Rat(1, 2), Rat(0)));
}

TEST_CASE("worked instance: closed forms at general kappa") {
    // lambda_1 = (kappa-1)(1-p)/p, lambda_2 = (kappa-1)p/(1-p),
    // breakpoints (0,(kappa-1)/2) -> (p/2,(kappa-1)p/2) -> (1/2,0).
    for (long pn : {1L, 2L}) {
        for (int kappa : {2, 3, 5}) {
            Rat p(pn, 5);
            auto [m, rule] = ex6_bsc<Rat>(p, kappa);
            BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
            Rat k1(kappa - 1);
            REQUIRE(c.M() == 2);
            CHECK(c.entries[0].delay == k1 / Rat(2));
            CHECK(c.entries[1].lambda == GValue(k1 * (Rat(1) - p) / p));
            CHECK(c.entries[1].alpha == p / Rat(2));
            CHECK(c.entries[1].delay == k1 * p / Rat(2));
            CHECK(c.entries[2].lambda == GValue(k1 * p / (Rat(1) - p)));
            CHECK(c.entries[2].alpha == Rat(1, 2));
            CHECK(c.entries[2].delay == Rat(0));
        }
    }
}

TEST_CASE("sweep vertices match brute force on random instances") {
    std::mt19937_64 rng(404);
    int rounds = 0;
    while (rounds < 30) {
        int nx = 2 + static_cast<int>(rng() % 2);
        int ny = 2 + static_cast<int>(rng() % 2);
        int kappa = 1 + static_cast<int>(rng() % 3);
        JointModel<Rat> m = random_model(rng, nx, ny, kappa);
        StoppingRule<Rat> rule = random_rule(rng, nx, kappa);
        ++rounds;
        BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
        auto brute = brute_force_breakpoints(m, rule);
        auto verts = c.vertices();
        REQUIRE(verts.size() == brute.size());
        for (std::size_t i = 0; i < verts.size(); ++i) {
            CAPTURE(rounds);
            CAPTURE(i);
            CHECK(verts[i].first == brute[i].alpha);
            CHECK(verts[i].second == brute[i].delay);
        }
    }
}

TEST_CASE("brute force returns the smallest attaining trees on the worked instance") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    auto brute = brute_force_breakpoints(m, rule);
    StoppingTree<Rat> full = complete_tree(m, rule);
    REQUIRE(brute.size() == 3);
    CHECK(trees_equal(brute[0].tree, full));
    CHECK(trees_equal(brute[1].tree, prune_at(full, {yb({1})})));
    CHECK(trees_equal(brute[2].tree, prune_at(full, {yb({0}), yb({1})})));
}

TEST_CASE("brute force refuses beyond the cap") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 3);
    CHECK_THROWS_AS(brute_force_breakpoints(m, rule, 10), RefusalError);
}

TEST_CASE("Lagrangian duality recovers every breakpoint") {
    // d_m = max over lambda in {lambda_1..lambda_M, 0} of
    //       [ J_lambda(T*(lambda)) - lambda * alpha_m ]  (inf * 0 == 0)
    std::mt19937_64 rng(505);
    for (int round = 0; round < 10; ++round) {
        JointModel<Rat> m = random_model(rng, 2, 2, 3);
        StoppingRule<Rat> rule = random_rule(rng, 2, 3);
        BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
        const StoppingTree<Rat>& base = c.entries[0].tree;
        std::vector<GValue> lambdas{GValue(Rat(0))};
        for (int i = 1; i <= c.M(); ++i) lambdas.push_back(c.entries[i].lambda);
        for (const auto& [alpha, delay] : c.vertices()) {
            Rat best(0);
            bool have = false;
            for (const GValue& lam : lambdas) {
                Rat value;
                GValue j = cost(optimal_subtree(base, lam), lam);
                if (lam.is_inf()) {
                    if (alpha != Rat(0) || j.is_inf()) continue;  // inf * positive: useless
                    value = j.finite();
                } else {
                    value = j.finite() - lam.finite() * alpha;
                }
                if (!have || best < value) {
                    best = value;
                    have = true;
                }
            }
            REQUIRE(have);
            CHECK(best == delay);
        }
    }
}

TEST_CASE("curve evaluation: vertices, mixtures, and the flat tail") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);

    auto at0 = evaluate_curve(c, Rat(0));
    CHECK(at0.delay == Rat(1, 2));
    REQUIRE(at0.mixture.size() == 1);
    CHECK(trees_equal(at0.mixture[0].first, c.entries[0].tree));
    CHECK(at0.mixture[0].second == Rat(1));

    auto mid = evaluate_curve(c, Rat(1, 16));
    CHECK(mid.delay == Rat(5, 16));
    REQUIRE(mid.mixture.size() == 2);
    CHECK(mid.mixture[0].second == Rat(1, 2));
    CHECK(mid.mixture[1].second == Rat(1, 2));
    CHECK(trees_equal(mid.mixture[0].first, c.entries[0].tree));
    CHECK(trees_equal(mid.mixture[1].first, c.entries[1].tree));

    auto v1 = evaluate_curve(c, Rat(1, 8));
    CHECK(v1.delay == Rat(1, 8));
    REQUIRE(v1.mixture.size() == 1);
    CHECK(trees_equal(v1.mixture[0].first, c.entries[1].tree));

    auto late = evaluate_curve(c, Rat(3, 10));
    CHECK(late.delay == Rat(1, 15));

    auto tail = evaluate_curve(c, Rat(3, 4));
    CHECK(tail.delay == Rat(0));
    REQUIRE(tail.mixture.size() == 1);
    CHECK(trees_equal(tail.mixture[0].first, c.entries[2].tree));
    CHECK(evaluate_curve(c, Rat(1)).delay == Rat(0));

    CHECK_THROWS_AS(evaluate_curve(c, Rat(-1, 10)), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_curve(c, Rat(11, 10)), std::invalid_argument);

    // mixture weights always reproduce alpha and the interpolated delay
    std::mt19937_64 rng(606);
    for (int round = 0; round < 6; ++round) {
        JointModel<Rat> rm = random_model(rng, 2, 2, 3);
        StoppingRule<Rat> rrule = random_rule(rng, 2, 3);
        BreakpointCurve<Rat> rc = breakpoint_sweep(rm, rrule);
        for (long num = 0; num <= 8; ++num) {
            Rat alpha(num, 8);
            auto ev = evaluate_curve(rc, alpha);
            Rat mix_alpha(0), mix_delay(0), wsum(0);
            for (const auto& [tree, weight] : ev.mixture) {
                mix_alpha += weight * tree.alpha();
                mix_delay += weight * tree.delay();
                wsum += weight;
            }
            CHECK(wsum == Rat(1));
            CHECK(mix_delay == ev.delay);
            if (alpha < rc.entries.back().alpha)
                CHECK(mix_alpha == alpha);
            else
                CHECK(mix_alpha == rc.entries.back().alpha);
        }
    }
}

TEST_CASE("lower bounds: tightness and validity") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);

    // depth 1 = (kappa-1) (1/2 - alpha (1-p)/p), tight at alpha = 0 and alpha_1
    CHECK(lower_bound(m, rule, Rat(0), 1) == Rat(1, 2));
    CHECK(lower_bound(m, rule, Rat(1, 8), 1) == Rat(1, 8));
    CHECK(lower_bound(m, rule, Rat(1, 4), 1) == Rat(0));  // clamped at 0
    // depth 2 additionally nails the second segment
    CHECK(lower_bound(m, rule, Rat(1, 8), 2) == Rat(1, 8));
    CHECK(lower_bound(m, rule, Rat(1, 4), 2) == Rat(1, 12));
    CHECK(lower_bound(m, rule, Rat(1, 2), 2) == Rat(0));

    CHECK_THROWS_AS(lower_bound(m, rule, Rat(2), 1), std::invalid_argument);
    CHECK_THROWS_AS(lower_bound(m, rule, Rat(1, 2), 3), std::invalid_argument);

    // validity on random instances: bound <= d(alpha) everywhere, depth 2 tighter
    std::mt19937_64 rng(707);
    for (int round = 0; round < 8; ++round) {
        JointModel<Rat> rm = random_model(rng, 2, 2, 3);
        StoppingRule<Rat> rrule = random_rule(rng, 2, 3);
        BreakpointCurve<Rat> rc = breakpoint_sweep(rm, rrule);
        for (long num = 0; num <= 10; ++num) {
            Rat alpha(num, 10);
            Rat d = evaluate_curve(rc, alpha).delay;
            Rat b1 = lower_bound(rm, rrule, alpha, 1);
            Rat b2 = lower_bound(rm, rrule, alpha, 2);
            CHECK(b1 <= d);
            CHECK(b2 <= d);
            CHECK(b1 <= b2);
        }
    }
}

TEST_CASE("degenerate curves") {
    JointModel<Rat> m;
    m.x_labels = {"0", "1"};
    m.y_labels = {"0", "1"};
    m.pmf = {{Rat(1, 3), Rat(1, 6)}, {Rat(1, 6), Rat(1, 3)}};
    m.kappa = 3;
    SUBCASE("S == kappa: the curve is a single point at the origin") {
        auto rule = make_first_hit<Rat>({});
        BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
        CHECK(c.M() == 0);
        CHECK(c.entries[0].alpha == Rat(0));
        CHECK(c.entries[0].delay == Rat(0));
        auto v = c.vertices();
        REQUIRE(v.size() == 1);
        CHECK(v[0] == std::make_pair(Rat(0), Rat(0)));
        CHECK(evaluate_curve(c, Rat(1, 2)).delay == Rat(0));
        CHECK(lower_bound(m, rule, Rat(1, 4), 1) == Rat(0));
        CHECK(lower_bound(m, rule, Rat(0), 2) == Rat(0));
    }
    SUBCASE("S == 1: one infinite step reaches zero delay at alpha = 0") {
        auto rule = make_first_hit<Rat>({0, 1});
        BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
        REQUIRE(c.M() == 1);
        CHECK(c.entries[0].delay == Rat(2));  // E(kappa - S) = kappa - 1
        CHECK(c.entries[1].lambda.is_inf());
        CHECK(c.entries[1].alpha == Rat(0));
        CHECK(c.entries[1].delay == Rat(0));
        auto v = c.vertices();
        REQUIRE(v.size() == 1);
        CHECK(v[0] == std::make_pair(Rat(0), Rat(0)));
        // the T^1 snapshot stops right after the first observation
        CHECK(c.entries[1].tree.size() == 3);
        CHECK(evaluate_curve(c, Rat(0)).delay == Rat(0));
        CHECK(lower_bound(m, rule, Rat(0), 1) == Rat(0));
        CHECK(lower_bound(m, rule, Rat(1, 2), 1) == Rat(0));
    }
    SUBCASE("kappa = 1: every rule yields the origin curve") {
        m.kappa = 1;
        auto rule = make_first_hit<Rat>({1});
        BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
        CHECK(c.M() == 0);
        CHECK(c.entries[0].delay == Rat(0));
    }
}

TEST_CASE("infinite first multiplier on the erasure example") {
    auto [m, rule] = ex7_bec<Rat>(Rat(1, 2), Rat(1, 5), 3);
    BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
    REQUIRE(c.M() >= 1);
    CHECK(c.entries[1].lambda.is_inf());
    CHECK(c.entries[1].alpha == Rat(0));
    CHECK(c.entries[1].delay < c.entries[0].delay);
    // at most one infinite step, strictly decreasing afterwards
    for (int i = 2; i <= c.M(); ++i) CHECK(!c.entries[i].lambda.is_inf());
    // vertices skip the dominated complete-tree entry
    auto v = c.vertices();
    CHECK(v.front().first == Rat(0));
    CHECK(v.front().second == c.entries[1].delay);
    // the infinite-lambda optimal subtree is exactly T^1
    CHECK(trees_equal(optimal_subtree(c.entries[0].tree, GValue::infinity()), c.entries[1].tree));
    // brute force agrees
    auto brute = brute_force_breakpoints(m, rule);
    auto verts = c.vertices();
    REQUIRE(verts.size() == brute.size());
    for (std::size_t i = 0; i < verts.size(); ++i) {
        CHECK(verts[i].first == brute[i].alpha);
        CHECK(verts[i].second == brute[i].delay);
    }
}

TEST_CASE("dead observation symbols are collapsed out of the sweep") {
    JointModel<Rat> m;
    m.x_labels = {"0", "1"};
    m.y_labels = {"0", "1", "z"};
    m.pmf = {{Rat(1, 4), Rat(1, 4), Rat(0)}, {Rat(1, 4), Rat(1, 4), Rat(0)}};
    m.kappa = 2;
    auto rule = make_first_hit<Rat>({1});
    BreakpointCurve<Rat> c = breakpoint_sweep(m, rule);
    // complete tree has 13 nodes; the dead depth-1 subtree loses its 3 children
    CHECK(c.entries[0].tree.size() == 10);
    CHECK(!c.entries[0].tree.at(yb({2})).internal);
    // dead leaves contribute nothing anywhere
    CHECK(c.entries[0].alpha == Rat(0));
    auto brute = brute_force_breakpoints(m, rule);
    auto verts = c.vertices();
    REQUIRE(verts.size() == brute.size());
    for (std::size_t i = 0; i < verts.size(); ++i) {
        CHECK(verts[i].first == brute[i].alpha);
        CHECK(verts[i].second == brute[i].delay);
    }
}

TEST_CASE("float mode reproduces the worked instance approximately") {
    auto [m, rule] = ex6_bsc<double>(0.25, 2);
    BreakpointCurve<double> c = breakpoint_sweep(m, rule);
    REQUIRE(c.M() == 2);
    CHECK(c.entries[0].delay == doctest::Approx(0.5));
    CHECK(c.entries[1].lambda.finite() == doctest::Approx(3.0));
    CHECK(c.entries[1].alpha == doctest::Approx(0.125));
    CHECK(c.entries[2].lambda.finite() == doctest::Approx(1.0 / 3.0));
    CHECK(evaluate_curve(c, 0.0625).delay == doctest::Approx(0.3125));
    CHECK(lower_bound(m, rule, 0.125, 1) == doctest::Approx(0.125));
}
