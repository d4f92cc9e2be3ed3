#pragma once

#include "tst/solver.hpp"

namespace tst {

// ---------------------------------------------------------------------------
// One-step lookahead: stop the first time the immediate saving of waiting one
// more step, lambda * P(S = n+1 | Y^n), no longer covers its delay cost,
// P(S <= n | Y^n). Under the monotone hazard condition this myopic rule is
// globally optimal, which turns tree construction into a single walk.
// ---------------------------------------------------------------------------

template <class N>
struct MonotoneReport {
    bool passed = true;
    int n = -1;       // violating level: P(S=n | Y^{n-1}) < P(S=n+1 | Y^n)
    std::string y;    // the length-n witness string
    N left{}, right{};
};

// Check the monotone condition: along every live edge y^{n-1} -> y^n,
// P(S = n | Y^{n-1} = y^{n-1}) >= P(S = n+1 | Y^n = y^n), for n = 2..kappa.
// At n = kappa the right side is zero (S <= kappa surely), so the scan stops
// at kappa-1. First violation by level, then lexicographic.
template <class N>
MonotoneReport<N> monotone_check(const JointModel<N>& m, const StoppingRule<N>& rule) {
    using T = numeric_traits<N>;
    Engine<N> eng(m, rule);
    for (int n = 2; n < m.kappa; ++n) {
        std::string y(n, '\0');
        for (;;) {
            PathCtx<N> parent = eng.walk(y.substr(0, n - 1));
            if (!T::is_zero(parent.w)) {
                PathCtx<N> node = eng.child(parent, static_cast<unsigned char>(y[n - 1]));
                if (!T::is_zero(node.w)) {
                    N left = eng.wpnext(parent) / parent.w;
                    N right = eng.wpnext(node) / node.w;
                    if (T::lt(left, right)) return {false, n, y, left, right};
                }
            }
            int p = n - 1;
            while (p >= 0 &&
                   static_cast<unsigned char>(y[p]) == static_cast<unsigned>(m.ny()) - 1) {
                y[p] = '\0';
                --p;
            }
            if (p < 0) break;
            ++y[p];
        }
    }
    return {};
}

// Build the tree the one-step rule induces at a finite multiplier: a node is
// a leaf iff it sits at the horizon, is unreachable, or stopping is already
// (weakly) as cheap as one more step. Ties stop, matching optimal_subtree.
// The infimum ranges over n >= 1 -- the rule never alarms before the first
// observation, so the root is internal whenever waiting costs anything.
// (The nesting argument only covers levels >= 1; with the root included, a
// rule with P(S=1) = 0 would tie at the root and stop there, contradicting
// the equivalence.) At lambda = 0 every comparison ties, and the smallest
// of the tied minimizers is the bare root, matching optimal_subtree.
template <class N>
StoppingTree<N> lookahead_tree(const JointModel<N>& m, const StoppingRule<N>& rule,
                               const Ext<N>& lambda) {
    using T = numeric_traits<N>;
    {
        auto issues = validate_model(m);
        if (!issues.empty()) throw std::invalid_argument("invalid model: " + issues.front());
    }
    if (lambda.is_inf())
        throw std::invalid_argument("lookahead tree needs a finite multiplier");
    if (T::lt(lambda.finite(), T::zero()))
        throw std::invalid_argument("multiplier must be nonnegative");
    if (T::is_zero(lambda.finite())) return trivial_tree<N>(m.kappa);
    Engine<N> eng(m, rule);
    StoppingTree<N> t;
    t.kappa = m.kappa;
    long count = 0;
    auto build = [&](auto&& self, const PathCtx<N>& ctx, const std::string& key) -> void {
        if (++count > detail::kTreeNodeBudget)
            throw RefusalError("lookahead tree would exceed the node budget");
        TreeNode<N> node;
        node.stats = eng.stats(ctx);
        N wps = ctx.w - node.stats.a;
        node.internal = ctx.n == 0 ||
                        (ctx.n < m.kappa && !T::is_zero(ctx.w) &&
                         T::lt(wps, lambda.finite() * eng.wpnext(ctx)));
        if (!node.internal) {
            node.a_sub = node.stats.a;
            node.b_sub = node.stats.b;
            t.nodes.emplace(key, std::move(node));
            return;
        }
        node.a_sub = T::zero();
        node.b_sub = T::zero();
        auto [it, ok] = t.nodes.emplace(key, std::move(node));
        (void)ok;
        for (int g = 0; g < m.ny(); ++g) {
            std::string ck = key + static_cast<char>(g);
            self(self, eng.child(ctx, g), ck);
            const TreeNode<N>& c = t.nodes.at(ck);
            it->second.a_sub += c.a_sub;
            it->second.b_sub += c.b_sub;
        }
    };
    build(build, eng.root(), std::string());
    return t;
}

// Does the one-step rule reproduce the exact optimum across a multiplier
// grid? Refuses unless the monotone condition certifies the comparison is
// meaningful; under it, this is the constructive half of the equivalence.
template <class N>
bool lookahead_equivalence(const JointModel<N>& m, const StoppingRule<N>& rule,
                           const std::vector<Ext<N>>& lambdas) {
    MonotoneReport<N> rep = monotone_check(m, rule);
    if (!rep.passed) {
        std::string ws;
        for (char c : rep.y) ws += std::to_string(static_cast<int>(c));
        throw RefusalError("monotone condition fails at level " + std::to_string(rep.n) +
                           ", y-string [" + ws + "]; lookahead equivalence not certified");
    }
    StoppingTree<N> full = complete_tree(m, rule);
    for (const Ext<N>& lambda : lambdas)
        if (!trees_equal(lookahead_tree(m, rule, lambda), optimal_subtree(full, lambda)))
            return false;
    return true;
}

}  // namespace tst
