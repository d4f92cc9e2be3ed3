#pragma once

#include <functional>
#include <memory>

#include "tst/solver.hpp"

namespace tst {

// ---------------------------------------------------------------------------
// Permutation invariance and the composition-class solver. When the rule's
// law q depends on x^n only through its composition (symbol counts), entire
// classes of y-strings share their g-index, and the sweep runs over the
// composition DAG instead of the exponential tree.
// ---------------------------------------------------------------------------

struct RuleInvariance {
    bool invariant = false;
    bool structural = false;  // certified by rule shape alone, no enumeration
    std::string witness_x;    // violating x-string (index bytes)
    int witness_pos = -1;     // q changes when positions (pos, pos+1) swap
};

namespace detail {
constexpr long kPermCheckBudget = 500'000;
}

// Is q(x^n) invariant under permuting x^n? Structural for first-hit,
// composition tables, and nonnegative-weight sum thresholds; otherwise
// certified by exhaustive adjacent-transposition checks on levels
// n = 2..kappa-1 (level kappa is exempt: the horizon override fires there).
template <class N>
RuleInvariance is_rule_perm_invariant(const JointModel<N>& m, const StoppingRule<N>& rule,
                                      long budget = detail::kPermCheckBudget) {
    RuleInvariance r;
    switch (rule.kind) {
        case RuleKind::first_hit:
        case RuleKind::table_composition:
            r.invariant = r.structural = true;
            return r;
        case RuleKind::sum_threshold: {
            bool nonneg = true;
            for (long w : rule.weights) nonneg &= w >= 0;
            if (nonneg) {
                r.invariant = r.structural = true;
                return r;
            }
            break;
        }
        case RuleKind::table_prefix:
            break;
    }
    const int nx = m.nx();
    long checked = 0;
    for (int n = 2; n < m.kappa; ++n) {
        std::string x(n, '\0');
        for (;;) {
            for (int pos = 0; pos + 1 < n; ++pos) {
                if (x[pos] == x[pos + 1]) continue;
                if (++checked > budget)
                    throw RefusalError("permutation-invariance check budget exceeded at level " +
                                       std::to_string(n));
                std::string swapped = x;
                std::swap(swapped[pos], swapped[pos + 1]);
                if (rule_q(rule, x, nx) != rule_q(rule, swapped, nx)) {
                    r.invariant = false;
                    r.witness_x = x;
                    r.witness_pos = pos;
                    return r;
                }
            }
            int p = n - 1;
            while (p >= 0 && static_cast<unsigned char>(x[p]) == static_cast<unsigned>(nx) - 1) {
                x[p] = '\0';
                --p;
            }
            if (p < 0) break;
            ++x[p];
        }
    }
    r.invariant = true;
    return r;
}

struct TreeInvariance {
    bool invariant = true;
    std::string node, image;  // witness: `node` is internal, `image` is not
};

// Is the tree's internal set closed under transposing observation positions?
// Adjacent transpositions generate the full symmetric group, so checking them
// level by level certifies the whole orbit.
template <class N>
TreeInvariance is_tree_perm_invariant(const StoppingTree<N>& tree) {
    for (const auto& [key, node] : tree.nodes) {
        if (!node.internal) continue;
        for (std::size_t pos = 0; pos + 1 < key.size(); ++pos) {
            if (key[pos] == key[pos + 1]) continue;
            std::string img = key;
            std::swap(img[pos], img[pos + 1]);
            auto it = tree.nodes.find(img);
            if (it == tree.nodes.end() || !it->second.internal) return {false, key, img};
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Composition-class machinery.
// ---------------------------------------------------------------------------

namespace detail {

// all compositions of total n into `parts` nonnegative counts
inline void compositions_of(int n, int parts, std::vector<std::vector<int>>& out) {
    std::vector<int> c(parts, 0);
    auto rec = [&](auto&& self, int idx, int left) -> void {
        if (idx == parts - 1) {
            c[idx] = left;
            out.push_back(c);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[idx] = v;
            self(self, idx + 1, left - v);
        }
    };
    if (parts == 0) return;
    rec(rec, 0, n);
}

// q as a function of the x-composition: exact for structural kinds, via the
// ascending representative string for enumeration-certified rules.
template <class N>
std::function<N(const std::vector<int>&)> make_comp_q(const JointModel<N>& m,
                                                      const StoppingRule<N>& rule) {
    using T = numeric_traits<N>;
    switch (rule.kind) {
        case RuleKind::first_hit: {
            std::vector<int> targets = rule.targets;
            return [targets](const std::vector<int>& xc) {
                for (int t : targets)
                    if (xc[t] > 0) return T::one();
                return T::zero();
            };
        }
        case RuleKind::sum_threshold: {
            std::vector<long> w = rule.weights;
            long c = rule.threshold;
            return [w, c](const std::vector<int>& xc) {
                long s = 0;
                for (std::size_t i = 0; i < xc.size(); ++i) s += w[i] * xc[i];
                return s > c ? T::one() : T::zero();
            };
        }
        case RuleKind::table_composition: {
            auto memo = std::make_shared<std::map<std::vector<int>, N>>();
            StoppingRule<N> r = rule;
            return [r, memo](const std::vector<int>& xc) { return comp_qeff(r, xc, *memo); };
        }
        case RuleKind::table_prefix:
        default: {
            StoppingRule<N> r = rule;
            int nx = m.nx();
            return [r, nx](const std::vector<int>& xc) {
                std::string rep;
                for (int x = 0; x < nx; ++x) rep.append(xc[x], static_cast<char>(x));
                return rule_q(r, rep, nx);
            };
        }
    }
}

// joint masses of one y-composition class: per-string observation mass w_str,
// stop mass w_str * P(S <= n | y), and next-step mass w_str * P(S = n+1 | y)
template <class N>
struct ClassMass {
    N w_str, wps, wpnext;
};

template <class N>
ClassMass<N> class_mass(const JointModel<N>& m, const std::vector<int>& yc,
                        const std::function<N(const std::vector<int>&)>& qc) {
    using T = numeric_traits<N>;
    const int nx = m.nx();
    int n = 0;
    std::vector<N> py = m.py();
    N w_str = T::one();
    for (std::size_t g = 0; g < yc.size(); ++g) {
        n += yc[g];
        for (int i = 0; i < yc[g]; ++i) w_str = w_str * py[g];
    }
    ClassMass<N> out{w_str, T::zero(), T::zero()};
    if (T::is_zero(w_str)) return out;  // dead class: conditionals undefined, masses 0

    // xdist: P(x-composition | one y-string of this class), built by
    // convolving one multinomial per observation symbol
    std::map<std::vector<int>, N> xdist;
    xdist.emplace(std::vector<int>(nx, 0), T::one());
    for (std::size_t g = 0; g < yc.size(); ++g) {
        if (yc[g] == 0) continue;
        // per-step conditional P(X = x | Y = g)
        std::vector<N> cond(nx);
        for (int x = 0; x < nx; ++x) cond[x] = m.pmf[x][g] / py[g];
        for (int rep = 0; rep < yc[g]; ++rep) {
            std::map<std::vector<int>, N> next;
            for (const auto& [xc, mass] : xdist) {
                std::vector<int> xc2 = xc;
                for (int x = 0; x < nx; ++x) {
                    if (T::is_zero(cond[x])) continue;
                    ++xc2[x];
                    auto [it, fresh] = next.try_emplace(xc2, T::zero());
                    (void)fresh;
                    it->second += mass * cond[x];
                    --xc2[x];
                }
            }
            xdist = std::move(next);
        }
    }

    std::vector<N> px = m.px();
    N ps = T::zero(), pnext_cum = T::zero();
    for (const auto& [xc, mass] : xdist) {
        ps += mass * (n >= m.kappa ? T::one() : qc(xc));
        if (n + 1 >= m.kappa) {
            pnext_cum += mass;
        } else {
            std::vector<int> xc2 = xc;
            for (int x = 0; x < nx; ++x) {
                if (T::is_zero(px[x])) continue;
                ++xc2[x];
                pnext_cum += mass * px[x] * qc(xc2);
                --xc2[x];
            }
        }
    }
    out.wps = w_str * ps;
    out.wpnext = w_str * (pnext_cum - ps);
    return out;
}

}  // namespace detail

// Aggregate statistics of one y-composition class on the complete tree:
// total observation mass W, total alarm mass A, total delay mass B summed
// over the class's strings. (a is class-uniform; b is not, so only its sum
// is well-defined at class level.)
template <class N>
struct CompStats {
    N weight, alarm, delay;
};

template <class N>
CompStats<N> comp_node_stats(const JointModel<N>& m, const StoppingRule<N>& rule,
                             const std::vector<int>& counts) {
    using T = numeric_traits<N>;
    if (static_cast<int>(counts.size()) != m.ny())
        throw std::invalid_argument("composition size != |y_alphabet|");
    long n = 0;
    for (int v : counts) {
        if (v < 0) throw std::invalid_argument("negative count");
        n += v;
    }
    if (n > m.kappa) throw std::invalid_argument("composition deeper than kappa");
    RuleInvariance inv = is_rule_perm_invariant(m, rule);
    if (!inv.invariant)
        throw std::invalid_argument("rule is not permutation-invariant; class statistics undefined");
    auto qc = detail::make_comp_q(m, rule);

    // multiplicities of all sub-compositions via the lattice DP
    std::map<std::vector<int>, N> mult;
    std::vector<int> zero(counts.size(), 0);
    mult.emplace(zero, T::one());
    std::vector<std::vector<int>> levels{zero};
    for (long depth = 1; depth <= n; ++depth) {
        std::map<std::vector<int>, N> next;
        for (const auto& c : levels)
            for (std::size_t g = 0; g < counts.size(); ++g) {
                if (c[g] >= counts[g]) continue;
                std::vector<int> d = c;
                ++d[g];
                auto [it, fresh] = next.try_emplace(d, T::zero());
                (void)fresh;
                it->second += mult.at(c);
            }
        levels.clear();
        for (auto& [c, v] : next) {
            levels.push_back(c);
            mult.emplace(c, v);
        }
    }

    detail::ClassMass<N> own = detail::class_mass(m, counts, qc);
    CompStats<N> out;
    out.weight = mult.at(counts) * own.w_str;
    out.alarm = mult.at(counts) * (own.w_str - own.wps);
    out.delay = T::zero();
    for (const auto& [sub, msub] : mult) {
        long k = 0;
        for (int v : sub) k += v;
        if (k == 0 || k == n) continue;
        std::vector<int> rest(counts.size());
        for (std::size_t g = 0; g < counts.size(); ++g) rest[g] = counts[g] - sub[g];
        detail::ClassMass<N> cm = detail::class_mass(m, sub, qc);
        N w_rest = T::one();
        std::vector<N> py = m.py();
        for (std::size_t g = 0; g < rest.size(); ++g)
            for (int i = 0; i < rest[g]; ++i) w_rest = w_rest * py[g];
        out.delay += msub * mult.at(rest) * w_rest * cm.wps;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Composition-class breakpoint sweep.
// ---------------------------------------------------------------------------

enum class CompPolicy {
    require_invariant,  // refuse when the rule is not certified invariant
    fallback            // fall back to the string sweep, flagging it
};

template <class N>
struct CompEntry {
    Ext<N> lambda;
    N alpha, delay;
    // snapshot of the internal class set (empty in fallback mode)
    std::vector<std::vector<int>> internal_classes;
};

template <class N>
struct CompCurve {
    std::vector<CompEntry<N>> entries;
    bool fell_back = false;
    int M() const { return static_cast<int>(entries.size()) - 1; }
    std::vector<std::pair<N, N>> vertices() const {
        std::size_t start = entries.size() > 1 && entries[1].lambda.is_inf() ? 1 : 0;
        std::vector<std::pair<N, N>> v;
        for (std::size_t m = start; m < entries.size(); ++m)
            v.emplace_back(entries[m].alpha, entries[m].delay);
        return v;
    }
};

template <class N>
CompCurve<N> comp_breakpoint_sweep(const JointModel<N>& m, const StoppingRule<N>& rule,
                                   CompPolicy policy = CompPolicy::require_invariant) {
    using T = numeric_traits<N>;
    {
        auto issues = validate_model(m);
        if (!issues.empty()) throw std::invalid_argument("invalid model: " + issues.front());
    }
    RuleInvariance inv = is_rule_perm_invariant(m, rule);
    if (!inv.invariant) {
        if (policy == CompPolicy::require_invariant) {
            std::string wx;
            for (char c : inv.witness_x) wx += std::to_string(static_cast<int>(c));
            throw RefusalError(
                "rule is not permutation-invariant (witness x-string [" + wx +
                "], swap positions " + std::to_string(inv.witness_pos) + "," +
                std::to_string(inv.witness_pos + 1) + "); composition sweep refused");
        }
        BreakpointCurve<N> sc = breakpoint_sweep(m, rule);
        CompCurve<N> out;
        out.fell_back = true;
        for (const auto& e : sc.entries) out.entries.push_back({e.lambda, e.alpha, e.delay, {}});
        return out;
    }

    auto qc = detail::make_comp_q(m, rule);
    const int ny = m.ny();

    // static per-class data for levels 0..kappa-1
    std::map<std::vector<int>, detail::ClassMass<N>> mass;
    for (int n = 0; n < m.kappa; ++n) {
        std::vector<std::vector<int>> level;
        detail::compositions_of(n, ny, level);
        for (const auto& c : level) mass.emplace(c, detail::class_mass(m, c, qc));
    }

    std::set<std::vector<int>> internal;  // the class set I
    for (const auto& [c, cm] : mass) internal.insert(c);

    // multiplicity of *present* strings per class, given the internal set
    auto present_mult = [&]() {
        std::map<std::vector<int>, N> mp;
        mp.emplace(std::vector<int>(ny, 0), T::one());
        // ascending by level: iterate classes sorted by total (map order is
        // lexicographic, so walk levels explicitly)
        for (int n = 1; n < m.kappa; ++n) {
            std::vector<std::vector<int>> level;
            detail::compositions_of(n, ny, level);
            for (const auto& c : level) {
                N v = T::zero();
                std::vector<int> p = c;
                for (int g = 0; g < ny; ++g) {
                    if (c[g] == 0) continue;
                    --p[g];
                    if (internal.count(p)) {
                        auto it = mp.find(p);
                        if (it != mp.end()) v += it->second;
                    }
                    ++p[g];
                }
                if (!T::is_zero(v)) mp.emplace(c, v);
            }
        }
        return mp;
    };

    // per-string delta masses of the internal set, by descending level
    auto deltas = [&]() {
        std::map<std::vector<int>, std::pair<N, N>> d;  // class -> (delta_b, delta_a)
        for (int n = m.kappa - 1; n >= 0; --n) {
            std::vector<std::vector<int>> level;
            detail::compositions_of(n, ny, level);
            for (const auto& c : level) {
                if (!internal.count(c)) continue;
                const detail::ClassMass<N>& cm = mass.at(c);
                N db = cm.wps, da = cm.wpnext;
                std::vector<int> ch = c;
                for (int g = 0; g < ny; ++g) {
                    ++ch[g];
                    auto it = d.find(ch);
                    if (it != d.end()) {
                        db += it->second.first;
                        da += it->second.second;
                    }
                    --ch[g];
                }
                d.emplace(c, std::make_pair(db, da));
            }
        }
        return d;
    };

    auto collapse = [&]() {
        auto d = deltas();
        for (auto it = internal.begin(); it != internal.end();) {
            const auto& [db, da] = d.at(*it);
            if (T::is_zero(db) && T::is_zero(da))
                it = internal.erase(it);
            else
                ++it;
        }
    };

    CompCurve<N> curve;
    auto record = [&](const Ext<N>& lambda) {
        auto mp = present_mult();
        N delay = T::zero(), reach = T::zero();
        for (const auto& [c, v] : mp) {
            if (!internal.count(c)) continue;
            const detail::ClassMass<N>& cm = mass.at(c);
            delay += v * cm.wps;
            reach += v * cm.wpnext;
        }
        N alpha = T::one() - reach;
        CompEntry<N> e{lambda, alpha, delay, {internal.begin(), internal.end()}};
        if (!curve.entries.empty()) {
            const CompEntry<N>& prev = curve.entries.back();
            if (curve.entries.size() >= 2 && !(e.lambda < prev.lambda))
                throw std::logic_error("composition sweep: lambda not strictly decreasing");
            if (!T::lt(e.delay, prev.delay))
                throw std::logic_error("composition sweep: delay not strictly decreasing");
            if (lambda.is_inf()) {
                if (!T::eq(e.alpha, prev.alpha))
                    throw std::logic_error("composition sweep: alpha moved on an infinite step");
            } else if (!T::eq(prev.delay - e.delay, lambda.finite() * (e.alpha - prev.alpha))) {
                throw std::logic_error("composition sweep: slope identity violated");
            }
        }
        curve.entries.push_back(std::move(e));
    };

    collapse();
    record(Ext<N>::infinity());
    if (!T::is_zero(curve.entries[0].alpha))
        throw std::logic_error("composition sweep: complete tree has alpha != 0");
    if (!T::eq(curve.entries[0].delay, expected_slack(m, rule)))
        throw std::logic_error("composition sweep: complete tree delay != E(kappa - S)");

    for (;;) {
        auto mp = present_mult();
        auto d = deltas();
        Ext<N> lam(T::zero());
        bool any = false;
        auto g_of = [&](const std::vector<int>& c) {
            const auto& [db, da] = d.at(c);
            if (T::is_zero(da)) {
                if (T::is_zero(db)) return Ext<N>(T::zero());
                return Ext<N>::infinity();
            }
            return Ext<N>(db / da);
        };
        for (const auto& c : internal) {
            if (!mp.count(c)) continue;
            any = true;
            Ext<N> g = g_of(c);
            if (lam < g) lam = g;
        }
        if (!any || lam == Ext<N>(T::zero())) break;
        std::vector<std::vector<int>> targets;
        for (const auto& c : internal)
            if (mp.count(c) && g_of(c) == lam) targets.push_back(c);
        for (const auto& c : targets) internal.erase(c);
        collapse();
        record(lam);
    }
    if (!T::is_zero(curve.entries.back().delay))
        throw std::logic_error("composition sweep: final delay != 0");
    return curve;
}

// Expand a composition-sweep entry into the equivalent string tree (small
// kappa only; the point of the class sweep is not to need this).
template <class N>
StoppingTree<N> expand_comp_entry(const JointModel<N>& m, const StoppingRule<N>& rule,
                                  const CompEntry<N>& entry) {
    std::set<std::vector<int>> internal(entry.internal_classes.begin(),
                                        entry.internal_classes.end());
    StoppingTree<N> full = complete_tree(m, rule);
    std::set<std::string> targets;
    auto rec = [&](auto&& self, const std::string& key, std::vector<int>& counts) -> void {
        if (!internal.count(counts)) {
            if (full.at(key).internal) targets.insert(key);
            return;
        }
        for (int g = 0; g < m.ny(); ++g) {
            ++counts[g];
            self(self, key + static_cast<char>(g), counts);
            --counts[g];
        }
    };
    std::vector<int> counts(m.ny(), 0);
    rec(rec, std::string(), counts);
    return prune_at(std::move(full), targets);
}

}  // namespace tst
