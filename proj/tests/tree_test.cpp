#include "doctest.h"

#include "tst/examples.hpp"
#include "tst/tree.hpp"
#include "test_util.hpp"

using namespace tst;
using namespace tstest;

namespace {

std::string yb(std::initializer_list<int> syms) {
    std::string s;
    for (int v : syms) s.push_back(static_cast<char>(v));
    return s;
}

// Rebuild every annotation of `shape` from the enumeration oracle: node stats
// straight off x-string sums, subtree aggregates bottom-up over the map.
StoppingTree<Rat> reannotate(const JointModel<Rat>& m, const StoppingRule<Rat>& rule,
                             const StoppingTree<Rat>& shape) {
    StoppingTree<Rat> out;
    out.kappa = shape.kappa;
    for (const auto& [key, node] : shape.nodes) {
        TreeNode<Rat> n;
        n.stats = oracle_node_stats(m, rule, key);
        n.internal = node.internal;
        n.a_sub = n.b_sub = 0;
        out.nodes.emplace(key, std::move(n));
    }
    // reverse byte-lex order visits every child before its parent
    for (auto it = out.nodes.rbegin(); it != out.nodes.rend(); ++it) {
        TreeNode<Rat>& n = it->second;
        if (!n.internal) {
            n.a_sub = n.stats.a;
            n.b_sub = n.stats.b;
            continue;
        }
        for (int g = 0; g < m.ny(); ++g) {
            const TreeNode<Rat>& c = out.nodes.at(it->first + static_cast<char>(g));
            n.a_sub += c.a_sub;
            n.b_sub += c.b_sub;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("worked instance: complete tree annotations") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    StoppingTree<Rat> t = complete_tree(m, rule);
    CHECK(t.size() == 7);
    CHECK(t.kappa == 2);
    CHECK(t.alpha() == Rat(0));
    CHECK(t.delay() == Rat(1, 2));
    CHECK(t.at("").stats.w == Rat(1));
    CHECK(t.at("").stats.a == Rat(1));
    CHECK(t.at(yb({0})).a_sub == Rat(0));
    CHECK(t.at(yb({0})).b_sub == Rat(1, 8));
    CHECK(t.at(yb({1})).b_sub == Rat(3, 8));
    CHECK(t.at(yb({1, 0})).stats.b == Rat(3, 16));
    CHECK(t.at(yb({0, 1})).stats.b == Rat(1, 16));
    for (const auto& [key, node] : t.nodes)
        CHECK(node.internal == (key.size() < 2));
}

TEST_CASE("complete tree matches the oracle on random instances") {
    std::mt19937_64 rng(101);
    for (int round = 0; round < 10; ++round) {
        JointModel<Rat> m = random_model(rng, 2, 2, 4);
        StoppingRule<Rat> rule = random_rule(rng, 2, 4);
        StoppingTree<Rat> t = complete_tree(m, rule);
        StoppingTree<Rat> want = reannotate(m, rule, t);
        CHECK(trees_equal(t, want));
        CHECK(t.alpha() == Rat(0));
        CHECK(t.delay() == oracle_expected_slack(m, rule));
    }
}

TEST_CASE("induced stopping times") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    StoppingTree<Rat> full = complete_tree(m, rule);
    for (const auto& ys : all_y_strings(2, 2))
        if (ys.size() == 2) CHECK(induced_stop(full, ys) == 2);

    StoppingTree<Rat> fig3 = prune_at(full, {yb({1})});
    CHECK(induced_stop(fig3, yb({1, 0})) == 1);
    CHECK(induced_stop(fig3, yb({1, 1})) == 1);
    CHECK(induced_stop(fig3, yb({0, 0})) == 2);
    CHECK(induced_stop(fig3, yb({0, 1})) == 2);

    StoppingTree<Rat> triv = trivial_tree<Rat>(2);
    CHECK(induced_stop(triv, yb({0, 1})) == 0);

    CHECK_THROWS_AS(induced_stop(full, yb({0})), std::invalid_argument);
    CHECK_THROWS_AS(induced_stop(full, yb({0, 1, 1})), std::invalid_argument);
}

TEST_CASE("prune_at: worked instance") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    StoppingTree<Rat> full = complete_tree(m, rule);

    StoppingTree<Rat> fig3 = prune_at(full, {yb({1})});
    CHECK(fig3.size() == 5);
    CHECK(fig3.alpha() == Rat(1, 8));
    CHECK(fig3.delay() == Rat(1, 8));
    CHECK(!fig3.at(yb({1})).internal);
    CHECK(fig3.at(yb({1})).a_sub == Rat(1, 8));
    CHECK(fig3.at(yb({1})).b_sub == Rat(0));
    CHECK(fig3.nodes.count(yb({1, 0})) == 0);
    CHECK(fig3.nodes.count(yb({1, 1})) == 0);
    CHECK(trees_equal(fig3, reannotate(m, rule, fig3)));

    SUBCASE("empty set is identity") {
        CHECK(trees_equal(prune_at(full, {}), full));
    }
    SUBCASE("pruning the root gives the trivial tree") {
        StoppingTree<Rat> triv = prune_at(full, {std::string()});
        CHECK(triv.size() == 1);
        CHECK(triv.alpha() == Rat(1));
        CHECK(triv.delay() == Rat(0));
        CHECK(trees_equal(triv, trivial_tree<Rat>(2)));
    }
    SUBCASE("dominated targets are dropped, not double-applied") {
        StoppingTree<Rat> a = prune_at(full, {std::string(), yb({0}), yb({1})});
        StoppingTree<Rat> b = prune_at(full, {std::string()});
        CHECK(trees_equal(a, b));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(prune_at(full, {yb({1, 0})}), std::invalid_argument);  // leaf
        CHECK_THROWS_AS(prune_at(full, {yb({0, 0, 1})}), std::invalid_argument);  // absent
        CHECK_THROWS_AS(prune_at(fig3, {yb({1})}), std::invalid_argument);  // now a leaf
    }
}

TEST_CASE("prune_at agrees with from-scratch annotation on random trees") {
    std::mt19937_64 rng(202);
    for (int round = 0; round < 12; ++round) {
        int ny = 2 + static_cast<int>(rng() % 2);
        JointModel<Rat> m = random_model(rng, 2, ny, 3 + static_cast<int>(rng() % 2));
        StoppingRule<Rat> rule = random_rule(rng, 2, m.kappa);
        StoppingTree<Rat> t = complete_tree(m, rule);
        for (int step = 0; step < 3; ++step) {
            std::vector<std::string> internals;
            for (const auto& [key, node] : t.nodes)
                if (node.internal) internals.push_back(key);
            if (internals.empty()) break;
            std::set<std::string> targets;
            std::uniform_int_distribution<std::size_t> pick(0, internals.size() - 1);
            int want = 1 + static_cast<int>(rng() % 3);
            for (int i = 0; i < want; ++i) targets.insert(internals[pick(rng)]);
            t = prune_at(t, targets);
            CHECK(trees_equal(t, reannotate(m, rule, t)));
        }
    }
}

TEST_CASE("cost in both numeric regimes of lambda") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 2);
    StoppingTree<Rat> full = complete_tree(m, rule);
    StoppingTree<Rat> fig3 = prune_at(full, {yb({1})});
    StoppingTree<Rat> triv = trivial_tree<Rat>(2);

    CHECK(cost(full, GValue(Rat(7))) == GValue(Rat(1, 2)));
    CHECK(cost(full, GValue::infinity()) == GValue(Rat(1, 2)));  // alpha = 0
    CHECK(cost(fig3, GValue(Rat(1))) == GValue(Rat(1, 4)));
    CHECK(cost(fig3, GValue::infinity()) == GValue::infinity());
    CHECK(cost(triv, GValue(Rat(5))) == GValue(Rat(5)));
    CHECK(cost(triv, GValue(Rat(0))) == GValue(Rat(0)));
}

TEST_CASE("cost aggregates injected statistics") {
    // Hand-built shape with synthetic J values in b (a = 0), exercising leaf
    // aggregation in isolation from any model.
    StoppingTree<Rat> t;
    t.kappa = 2;
    auto put = [&](const std::string& key, long j, bool internal) {
        TreeNode<Rat> n;
        n.stats = {Rat(1), Rat(0), Rat(j)};
        n.internal = internal;
        n.a_sub = 0;
        n.b_sub = internal ? Rat(0) : Rat(j);
        t.nodes.emplace(key, n);
    };
    put("", 4, true);
    put(yb({0}), 2, true);
    put(yb({1}), 1, false);
    put(yb({0, 0}), 1, false);
    put(yb({0, 1}), 1, false);
    // fill aggregates bottom-up by hand
    t.nodes[yb({0})].b_sub = Rat(2);
    t.nodes[""].b_sub = Rat(3);
    CHECK(cost(t, GValue(Rat(1))) == GValue(Rat(3)));
    // stopping at "0" instead would cost its own J = 2 under the subtree
    StoppingTree<Rat> t2 = prune_at(t, {yb({0})});
    CHECK(cost(t2, GValue(Rat(1))) == GValue(Rat(3)));
}

TEST_CASE("alpha and delay match direct path enumeration") {
    std::mt19937_64 rng(303);
    for (int round = 0; round < 8; ++round) {
        JointModel<Rat> m = random_model(rng, 2, 2, 4);
        StoppingRule<Rat> rule = random_rule(rng, 2, 4);
        StoppingTree<Rat> t = complete_tree(m, rule);
        // prune a couple of random internal nodes to get a nontrivial shape
        std::vector<std::string> internals;
        for (const auto& [key, node] : t.nodes)
            if (node.internal && !key.empty()) internals.push_back(key);
        std::set<std::string> targets;
        std::uniform_int_distribution<std::size_t> pick(0, internals.size() - 1);
        targets.insert(internals[pick(rng)]);
        targets.insert(internals[pick(rng)]);
        t = prune_at(t, targets);

        Rat alpha = 0, delay = 0;
        for (const auto& ys : all_y_strings(2, 4)) {
            if (ys.size() != 4) continue;
            int stop = induced_stop(t, ys);
            // P(T < S, Y = ys) and E[(T - S)^+ ; Y = ys] from the oracle joint
            Rat w = oracle_node_stats(m, rule, ys).w;
            alpha += w - oracle_joint_stop(m, rule, ys, stop);
            for (int k = 1; k < stop; ++k) delay += oracle_joint_stop(m, rule, ys, k);
        }
        CHECK(t.alpha() == alpha);
        CHECK(t.delay() == delay);
    }
}

TEST_CASE("complete tree refuses beyond the node budget") {
    auto [m, rule] = ex6_bsc<Rat>(Rat(1, 4), 22);
    CHECK_THROWS_AS(complete_tree(m, rule), RefusalError);
}
