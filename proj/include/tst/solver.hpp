#pragma once

#include <utility>
#include <vector>

#include "tst/tree.hpp"

namespace tst {

// ---------------------------------------------------------------------------
// The Lagrangian machinery: per-node g-indices, optimal subtrees at a fixed
// multiplier, and the full breakpoint sweep producing the exact tradeoff
// curve d(alpha) between expected reaction delay and false-alarm probability.
// ---------------------------------------------------------------------------

// g(y, T) = (b_sub - b) / (a - a_sub), the multiplier at which stopping at y
// ties with keeping its current subtree. Conventions: 0/0 = 0, pos/0 = +inf.
template <class N>
Ext<N> g_index(const StoppingTree<N>& tree, const std::string& key) {
    using T = numeric_traits<N>;
    const TreeNode<N>& node = tree.at(key);
    if (!node.internal) throw std::invalid_argument("g_index of a leaf");
    N da = node.stats.a - node.a_sub;
    N db = node.b_sub - node.stats.b;
    if (T::is_zero(da)) {
        if (T::is_zero(db)) return Ext<N>(T::zero());
        return Ext<N>::infinity();
    }
    return Ext<N>(db / da);
}

// The J_lambda-optimal pruning of `tree` by backward induction; ties stop
// (the smallest optimal subtree). lambda = +inf minimizes (alpha, delay)
// lexicographically.
template <class N>
StoppingTree<N> optimal_subtree(const StoppingTree<N>& tree, const Ext<N>& lambda) {
    using T = numeric_traits<N>;
    std::set<std::string> stops;
    if (lambda.is_inf()) {
        std::map<std::string, std::pair<N, N>> csum;  // children's (alpha, delay) optima
        for (auto it = tree.nodes.rbegin(); it != tree.nodes.rend(); ++it) {
            const std::string& key = it->first;
            const TreeNode<N>& node = it->second;
            std::pair<N, N> pick{node.stats.a, node.stats.b};
            if (node.internal) {
                const std::pair<N, N>& kids = csum.at(key);
                bool stop_here =
                    T::lt(pick.first, kids.first) ||
                    (T::eq(pick.first, kids.first) && !T::lt(kids.second, pick.second));
                if (stop_here)
                    stops.insert(key);
                else
                    pick = kids;
            }
            if (!key.empty()) {
                std::string parent = key.substr(0, key.size() - 1);
                auto [pit, fresh] = csum.try_emplace(parent, std::make_pair(T::zero(), T::zero()));
                (void)fresh;
                pit->second.first += pick.first;
                pit->second.second += pick.second;
            }
        }
    } else {
        const N& lam = lambda.finite();
        if (T::lt(lam, T::zero())) throw std::invalid_argument("lambda must be nonnegative");
        std::map<std::string, N> csum;
        for (auto it = tree.nodes.rbegin(); it != tree.nodes.rend(); ++it) {
            const std::string& key = it->first;
            const TreeNode<N>& node = it->second;
            N leaf = node.stats.b + lam * node.stats.a;
            N pick = leaf;
            if (node.internal) {
                const N& kids = csum.at(key);
                if (!T::lt(kids, leaf))
                    stops.insert(key);  // stopping ties or wins
                else
                    pick = kids;
            }
            if (!key.empty()) {
                std::string parent = key.substr(0, key.size() - 1);
                auto [pit, fresh] = csum.try_emplace(parent, T::zero());
                (void)fresh;
                pit->second += pick;
            }
        }
    }
    return prune_at(tree, stops);
}

// Collapse every taut internal node (a == a_sub and b == b_sub): pruning
// there moves no mass, so the collapsed tree is pointwise equivalent. One
// pass suffices because such prunes leave all other aggregates unchanged.
template <class N>
StoppingTree<N> collapse_taut(StoppingTree<N> tree) {
    using T = numeric_traits<N>;
    std::set<std::string> taut;
    for (const auto& [key, node] : tree.nodes)
        if (node.internal && T::eq(node.stats.a, node.a_sub) && T::eq(node.stats.b, node.b_sub))
            taut.insert(key);
    if (taut.empty()) return tree;
    return prune_at(std::move(tree), taut);
}

template <class N>
struct CurveEntry {
    Ext<N> lambda;  // lambda_m; entry 0 carries a +inf sentinel
    N alpha, delay;
    StoppingTree<N> tree;  // T^m, taut-collapsed
};

template <class N>
struct BreakpointCurve {
    std::vector<CurveEntry<N>> entries;  // m = 0..M
    StoppingTree<N> terminal;            // the lambda = 0 endpoint (1, 0)

    int M() const { return static_cast<int>(entries.size()) - 1; }

    // Vertices of the lower convex envelope d(alpha). The complete-tree entry
    // is dominated when the sweep opens with an infinite multiplier.
    std::vector<std::pair<N, N>> vertices() const {
        std::size_t start = entries.size() > 1 && entries[1].lambda.is_inf() ? 1 : 0;
        std::vector<std::pair<N, N>> v;
        for (std::size_t m = start; m < entries.size(); ++m)
            v.emplace_back(entries[m].alpha, entries[m].delay);
        return v;
    }
};

namespace detail {

template <class N>
void sweep_check(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("breakpoint sweep invariant violated: ") + what);
}

template <class N>
BreakpointCurve<N> sweep_impl(const JointModel<N>& m, const StoppingRule<N>& rule,
                              long max_entries) {
    using T = numeric_traits<N>;
    {
        auto issues = validate_model(m);
        if (!issues.empty()) throw std::invalid_argument("invalid model: " + issues.front());
    }
    const bool truncated_mode = max_entries >= 0;
    StoppingTree<N> tree = collapse_taut(complete_tree(m, rule));
    BreakpointCurve<N> curve;
    curve.terminal = trivial_tree<N>(m.kappa);
    curve.entries.push_back({Ext<N>::infinity(), tree.alpha(), tree.delay(), tree});
    sweep_check<N>(T::is_zero(curve.entries[0].alpha), "complete tree has alpha != 0");
    sweep_check<N>(T::eq(curve.entries[0].delay, expected_slack(m, rule)),
                   "complete tree delay != E(kappa - S)");

    for (;;) {
        if (truncated_mode && static_cast<long>(curve.entries.size()) > max_entries) return curve;
        Ext<N> lam(T::zero());
        std::vector<std::string> internals;
        for (const auto& [key, node] : tree.nodes) {
            if (!node.internal) continue;
            internals.push_back(key);
            Ext<N> g = g_index(tree, key);
            if (lam < g) lam = g;
        }
        if (internals.empty()) break;               // already at the trivial tree
        if (lam == Ext<N>(T::zero())) break;        // lambda_m = 0: terminal reached
        std::set<std::string> targets;
        for (const auto& key : internals)
            if (g_index(tree, key) == lam) targets.insert(key);
        tree = collapse_taut(prune_at(std::move(tree), targets));

        const CurveEntry<N>& prev = curve.entries.back();
        CurveEntry<N> e{lam, tree.alpha(), tree.delay(), tree};
        if (curve.entries.size() >= 2)
            sweep_check<N>(e.lambda < prev.lambda, "lambda not strictly decreasing");
        sweep_check<N>(T::lt(e.delay, prev.delay), "delay not strictly decreasing");
        if (lam.is_inf()) {
            sweep_check<N>(T::eq(e.alpha, prev.alpha), "alpha moved on an infinite step");
        } else {
            sweep_check<N>(T::lt(prev.alpha, e.alpha), "alpha not increasing on a finite step");
            sweep_check<N>(T::eq(prev.delay - e.delay, lam.finite() * (e.alpha - prev.alpha)),
                           "slope identity violated");
        }
        curve.entries.push_back(std::move(e));
    }
    sweep_check<N>(T::is_zero(curve.entries.back().delay), "final delay != 0");
    return curve;
}

}  // namespace detail

// The exact tradeoff curve: entries m = 0..M with multipliers, breakpoints,
// and the pruned trees T^m, swept from the complete tree down to delay 0.
template <class N>
BreakpointCurve<N> breakpoint_sweep(const JointModel<N>& m, const StoppingRule<N>& rule) {
    return detail::sweep_impl(m, rule, -1);
}

// d(alpha) plus the optimal (possibly randomized) stopping tree: a vertex is
// attained by a single tree, interior points by mixing the two neighbors.
template <class N>
struct CurveEvaluation {
    N delay;
    std::vector<std::pair<StoppingTree<N>, N>> mixture;  // (tree, weight), weights sum to 1
};

template <class N>
CurveEvaluation<N> evaluate_curve(const BreakpointCurve<N>& curve, const N& alpha) {
    using T = numeric_traits<N>;
    if (T::lt(alpha, T::zero()) || T::lt(T::one(), alpha))
        throw std::invalid_argument("alpha must lie in [0, 1]");
    std::size_t start = curve.entries.size() > 1 && curve.entries[1].lambda.is_inf() ? 1 : 0;
    const auto& es = curve.entries;
    const std::size_t last = es.size() - 1;
    if (!T::lt(alpha, es[last].alpha))  // alpha >= alpha_M: delay floor reached
        return {es[last].delay, {{es[last].tree, T::one()}}};
    if (!T::lt(es[start].alpha, alpha))  // alpha <= left endpoint (defensive clamp)
        return {es[start].delay, {{es[start].tree, T::one()}}};
    for (std::size_t i = start; i < last; ++i) {
        if (T::eq(es[i].alpha, alpha)) return {es[i].delay, {{es[i].tree, T::one()}}};
        if (T::lt(es[i].alpha, alpha) && T::lt(alpha, es[i + 1].alpha)) {
            N span = es[i + 1].alpha - es[i].alpha;
            N theta = (es[i + 1].alpha - alpha) / span;
            N d = theta * es[i].delay + (T::one() - theta) * es[i + 1].delay;
            return {d, {{es[i].tree, theta}, {es[i + 1].tree, T::one() - theta}}};
        }
    }
    return {es[last].delay, {{es[last].tree, T::one()}}};  // unreachable
}

// Convexity lower bounds on d(alpha) from the first one or two sweep steps:
//   depth 1: the tangent through the left endpoint with slope lambda_1;
//   depth 2: exact on the first segment, then the slope-lambda_2 extension.
template <class N>
N lower_bound(const JointModel<N>& m, const StoppingRule<N>& rule, const N& alpha, int depth) {
    using T = numeric_traits<N>;
    if (T::lt(alpha, T::zero()) || T::lt(T::one(), alpha))
        throw std::invalid_argument("alpha must lie in [0, 1]");
    if (depth != 1 && depth != 2) throw std::invalid_argument("depth must be 1 or 2");
    BreakpointCurve<N> c = detail::sweep_impl(m, rule, depth);
    const auto& es = c.entries;
    const int M = c.M();
    if (M == 0) return T::zero();  // curve is identically 0
    const bool inf1 = es[1].lambda.is_inf();
    N zero = T::zero();
    auto clamp0 = [&](const N& v) { return T::lt(v, zero) ? zero : v; };

    if (depth == 1) {
        if (inf1) return T::is_zero(alpha) ? es[1].delay : zero;
        return clamp0(es[0].delay - es[1].lambda.finite() * alpha);
    }
    if (inf1) {
        // left endpoint (0, d_1); extend with lambda_2 when present, else the
        // sweep finished and the curve is flat zero beyond it
        if (M >= 2) return clamp0(es[1].delay - es[2].lambda.finite() * alpha);
        return T::is_zero(alpha) ? es[1].delay : zero;
    }
    if (!T::lt(es[1].alpha, alpha))  // exact on the first segment
        return clamp0(es[0].delay - es[1].lambda.finite() * alpha);
    N slope2 = M >= 2 ? es[2].lambda.finite() : zero;
    return clamp0(es[1].delay - slope2 * (alpha - es[1].alpha));
}

// ---------------------------------------------------------------------------
// Brute force: enumerate every stopping tree, keep the per-alpha delay
// minima, and return the lower convex envelope. Ground truth for tests.
// ---------------------------------------------------------------------------

template <class N>
struct BrutePoint {
    N alpha, delay;
    StoppingTree<N> tree;  // smallest tree attaining this vertex
};

namespace detail {

// node count + sorted leaf keys, the determinism tiebreak for equal vertices
inline std::pair<std::size_t, std::vector<std::string>> shape_rank(
    std::vector<std::string> leaves) {
    std::sort(leaves.begin(), leaves.end());
    std::set<std::string> nodes;
    for (const auto& leaf : leaves)
        for (std::size_t len = 0; len <= leaf.size(); ++len) nodes.insert(leaf.substr(0, len));
    return {nodes.size(), std::move(leaves)};
}

}  // namespace detail

template <class N>
std::vector<BrutePoint<N>> brute_force_breakpoints(const JointModel<N>& m,
                                                   const StoppingRule<N>& rule,
                                                   long cap = 1'000'000) {
    using T = numeric_traits<N>;
    {
        auto issues = validate_model(m);
        if (!issues.empty()) throw std::invalid_argument("invalid model: " + issues.front());
    }
    // count trees first (saturating at cap + 1)
    const long hi = cap + 1;
    long count = 1;  // trees rooted at depth kappa (single leaf)
    for (int depth = m.kappa - 1; depth >= 0; --depth) {
        long prod = 1;
        for (int g = 0; g < m.ny(); ++g) {
            if (prod > hi / std::max(count, 1L)) {
                prod = hi;
                break;
            }
            prod *= count;
            if (prod >= hi) {
                prod = hi;
                break;
            }
        }
        count = prod >= hi ? hi : prod + 1;
    }
    if (count >= hi)
        throw RefusalError("brute force would enumerate more than " + std::to_string(cap) +
                           " stopping trees");

    StoppingTree<N> full = complete_tree(m, rule);

    // Enumerate trees via a pending-frontier recursion: each pending node is
    // either made a leaf or expanded into its children.
    struct Best {
        N delay;
        std::vector<std::string> leaves;
    };
    std::map<N, Best> best;  // alpha -> minimal delay (+ smallest shape)
    std::vector<std::string> pending{std::string()};
    std::vector<std::string> leaves;
    auto consider = [&](const N& alpha, const N& delay) {
        auto it = best.find(alpha);
        if (it == best.end()) {
            best.emplace(alpha, Best{delay, leaves});
            return;
        }
        if (T::lt(delay, it->second.delay)) {
            it->second = Best{delay, leaves};
            return;
        }
        if (T::eq(delay, it->second.delay) &&
            detail::shape_rank(leaves) < detail::shape_rank(it->second.leaves))
            it->second.leaves = leaves;
    };
    auto rec = [&](auto&& self, N alpha, N delay) -> void {
        if (pending.empty()) {
            consider(alpha, delay);
            return;
        }
        std::string key = pending.back();
        pending.pop_back();
        const TreeNode<N>& node = full.at(key);
        // option 1: stop here
        leaves.push_back(key);
        self(self, alpha + node.stats.a, delay + node.stats.b);
        leaves.pop_back();
        // option 2: expand (only below the horizon)
        if (node.internal) {
            for (int g = 0; g < m.ny(); ++g) pending.push_back(key + static_cast<char>(g));
            self(self, std::move(alpha), std::move(delay));
            pending.resize(pending.size() - m.ny());
        }
        pending.push_back(std::move(key));
    };
    rec(rec, T::zero(), T::zero());

    // lower convex hull over the per-alpha minima (strict turns only)
    std::vector<std::pair<N, const Best*>> pts;
    pts.reserve(best.size());
    for (const auto& [alpha, b] : best) pts.emplace_back(alpha, &b);
    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b2) {
        N ax = pts[a].first - pts[o].first, ay = pts[a].second->delay - pts[o].second->delay;
        N bx = pts[b2].first - pts[o].first, by = pts[b2].second->delay - pts[o].second->delay;
        return ax * by - ay * bx;
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (hull.size() >= 2 &&
               !T::lt(T::zero(), cross(hull[hull.size() - 2], hull[hull.size() - 1], i)))
            hull.pop_back();
        hull.push_back(i);
    }
    std::vector<BrutePoint<N>> out;
    for (std::size_t idx : hull) {
        const auto& [alpha, b] = pts[idx];
        std::set<std::string> targets;
        for (const auto& leaf : b->leaves)
            if (full.at(leaf).internal) targets.insert(leaf);
        out.push_back({alpha, b->delay, prune_at(full, targets)});
        if (T::is_zero(b->delay)) break;  // later hull points are dominated
    }
    return out;
}

}  // namespace tst
