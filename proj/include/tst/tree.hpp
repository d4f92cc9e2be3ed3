#pragma once

#include <map>
#include <set>
#include <string>

#include "tst/model.hpp"

namespace tst {

// ---------------------------------------------------------------------------
// Stopping trees. A tree is the full decision structure of a y-adapted
// stopping time T: nodes are y-prefixes (index byte strings, byte-lex map
// order = preorder), leaves are where T stops. Every node carries its own
// statistics plus leaf-aggregates over its subtree:
//   alpha(T) = sum over leaves of a   (false-alarm probability P(T < S))
//   delay(T) = sum over leaves of b   (expected reaction delay E(T - S)^+)
// ---------------------------------------------------------------------------

template <class N>
struct TreeNode {
    NodeStats<N> stats;
    N a_sub, b_sub;  // leaf sums over this node's subtree
    bool internal = false;
};

template <class N>
struct StoppingTree {
    int kappa = 0;
    std::map<std::string, TreeNode<N>> nodes;

    const TreeNode<N>& at(const std::string& key) const {
        auto it = nodes.find(key);
        if (it == nodes.end()) throw std::invalid_argument("node not in tree");
        return it->second;
    }
    N alpha() const { return at("").a_sub; }
    N delay() const { return at("").b_sub; }
    std::size_t size() const { return nodes.size(); }
};

namespace detail {
constexpr long kTreeNodeBudget = 1L << 21;
}

// The complete tree: every node of depth < kappa is internal. This is the
// zero-false-alarm endpoint (all depth-kappa leaves have a = 0).
template <class N>
StoppingTree<N> complete_tree(const JointModel<N>& m, const StoppingRule<N>& rule) {
    long count = 1, pw = 1;
    for (int n = 1; n <= m.kappa; ++n) {
        pw *= m.ny();
        count += pw;
        if (count > detail::kTreeNodeBudget)
            throw RefusalError("complete tree would exceed the node budget (|Y|=" +
                               std::to_string(m.ny()) + ", kappa=" + std::to_string(m.kappa) +
                               ")");
    }
    Engine<N> eng(m, rule);
    StoppingTree<N> t;
    t.kappa = m.kappa;
    auto build = [&](auto&& self, const PathCtx<N>& ctx, const std::string& key) -> void {
        TreeNode<N> node;
        node.stats = eng.stats(ctx);
        node.internal = ctx.n < m.kappa;
        if (!node.internal) {
            node.a_sub = node.stats.a;
            node.b_sub = node.stats.b;
            t.nodes.emplace(key, std::move(node));
            return;
        }
        node.a_sub = numeric_traits<N>::zero();
        node.b_sub = numeric_traits<N>::zero();
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

// The root-only tree (always alarm immediately): alpha = 1, delay = 0.
template <class N>
StoppingTree<N> trivial_tree(int kappa) {
    using T = numeric_traits<N>;
    StoppingTree<N> t;
    t.kappa = kappa;
    TreeNode<N> root;
    root.stats = {T::one(), T::one(), T::zero()};
    root.a_sub = T::one();
    root.b_sub = T::zero();
    root.internal = false;
    t.nodes.emplace(std::string(), std::move(root));
    return t;
}

// T(y^kappa): the depth at which the tree stops along this observation path.
template <class N>
int induced_stop(const StoppingTree<N>& tree, const std::string& ybytes) {
    if (static_cast<int>(ybytes.size()) != tree.kappa)
        throw std::invalid_argument("induced_stop expects a length-kappa y-string");
    std::string key;
    for (;;) {
        auto it = tree.nodes.find(key);
        if (it == tree.nodes.end()) throw std::logic_error("malformed tree: missing node");
        if (!it->second.internal) return static_cast<int>(key.size());
        key.push_back(ybytes[key.size()]);
    }
}

// Prune the tree at every node in `targets`: each becomes a leaf and its
// descendants are removed. Targets must be internal nodes of the tree; a
// target dominated by another target (a strict ancestor in the set) is
// dropped, so the effective set is an antichain. The empty set is identity.
template <class N>
StoppingTree<N> prune_at(StoppingTree<N> tree, const std::set<std::string>& targets_in) {
    for (const auto& tgt : targets_in) {
        auto it = tree.nodes.find(tgt);
        if (it == tree.nodes.end()) throw std::invalid_argument("prune target not in tree");
        if (!it->second.internal) throw std::invalid_argument("prune target is already a leaf");
    }
    for (const auto& tgt : targets_in) {
        bool dominated = false;
        for (std::size_t len = 0; len < tgt.size() && !dominated; ++len)
            dominated = targets_in.count(tgt.substr(0, len)) != 0;
        if (dominated) continue;

        auto it = tree.nodes.find(tgt);
        N da = it->second.stats.a - it->second.a_sub;
        N db = it->second.stats.b - it->second.b_sub;
        it->second.internal = false;
        it->second.a_sub = it->second.stats.a;
        it->second.b_sub = it->second.stats.b;
        auto d = std::next(it);
        while (d != tree.nodes.end() && d->first.size() > tgt.size() &&
               d->first.compare(0, tgt.size(), tgt) == 0)
            d = tree.nodes.erase(d);
        for (std::size_t len = tgt.size(); len >= 1; --len) {
            auto anc = tree.nodes.find(tgt.substr(0, len - 1));
            anc->second.a_sub += da;
            anc->second.b_sub += db;
        }
    }
    return tree;
}

// Lagrangian cost J_lambda(T) = delay + lambda * alpha, extended to
// lambda = +inf: +inf unless the tree never false-alarms (alpha = 0).
template <class N>
Ext<N> cost(const StoppingTree<N>& tree, const Ext<N>& lambda) {
    const TreeNode<N>& root = tree.at("");
    if (lambda.is_inf()) {
        if (numeric_traits<N>::is_zero(root.a_sub)) return Ext<N>(root.b_sub);
        return Ext<N>::infinity();
    }
    return Ext<N>(root.b_sub + lambda.finite() * root.a_sub);
}

// Exact structural equality: same keys, same leaf/internal flags, same
// statistics (doubles compare under the global tolerance).
template <class N>
bool trees_equal(const StoppingTree<N>& x, const StoppingTree<N>& y) {
    using T = numeric_traits<N>;
    if (x.kappa != y.kappa || x.nodes.size() != y.nodes.size()) return false;
    auto i = x.nodes.begin();
    auto j = y.nodes.begin();
    for (; i != x.nodes.end(); ++i, ++j) {
        if (i->first != j->first || i->second.internal != j->second.internal) return false;
        if (!T::eq(i->second.stats.w, j->second.stats.w) ||
            !T::eq(i->second.stats.a, j->second.stats.a) ||
            !T::eq(i->second.stats.b, j->second.stats.b) ||
            !T::eq(i->second.a_sub, j->second.a_sub) ||
            !T::eq(i->second.b_sub, j->second.b_sub))
            return false;
    }
    return true;
}

}  // namespace tst
