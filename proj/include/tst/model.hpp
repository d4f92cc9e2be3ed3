#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tst/numeric.hpp"

namespace tst {

// ---------------------------------------------------------------------------
// Joint model: finite alphabets, i.i.d. joint pmf p(x,y), horizon kappa.
// y-strings and x-strings are passed around as byte strings of symbol
// *indices* (0-based); labels live only at the IO boundary.
// ---------------------------------------------------------------------------

template <class N>
struct JointModel {
    std::vector<std::string> x_labels;
    std::vector<std::string> y_labels;
    std::vector<std::vector<N>> pmf;  // pmf[x][y]
    int kappa = 1;

    int nx() const { return static_cast<int>(x_labels.size()); }
    int ny() const { return static_cast<int>(y_labels.size()); }

    std::vector<N> px() const {
        std::vector<N> m(nx(), numeric_traits<N>::zero());
        for (int x = 0; x < nx(); ++x)
            for (int y = 0; y < ny(); ++y) m[x] += pmf[x][y];
        return m;
    }
    std::vector<N> py() const {
        std::vector<N> m(ny(), numeric_traits<N>::zero());
        for (int x = 0; x < nx(); ++x)
            for (int y = 0; y < ny(); ++y) m[y] += pmf[x][y];
        return m;
    }
    int x_index(const std::string& label) const {
        auto it = std::find(x_labels.begin(), x_labels.end(), label);
        return it == x_labels.end() ? -1 : static_cast<int>(it - x_labels.begin());
    }
    int y_index(const std::string& label) const {
        auto it = std::find(y_labels.begin(), y_labels.end(), label);
        return it == y_labels.end() ? -1 : static_cast<int>(it - y_labels.begin());
    }
};

template <class N>
std::vector<std::string> validate_model(const JointModel<N>& m) {
    using T = numeric_traits<N>;
    std::vector<std::string> issues;
    if (m.x_labels.empty()) issues.push_back("x_alphabet is empty");
    if (m.y_labels.empty()) issues.push_back("y_alphabet is empty");
    {
        std::set<std::string> seen(m.x_labels.begin(), m.x_labels.end());
        if (seen.size() != m.x_labels.size()) issues.push_back("x_alphabet labels not distinct");
        std::set<std::string> seeny(m.y_labels.begin(), m.y_labels.end());
        if (seeny.size() != m.y_labels.size()) issues.push_back("y_alphabet labels not distinct");
    }
    if (m.kappa < 1) issues.push_back("kappa >= 1 violated");
    if (static_cast<int>(m.pmf.size()) != m.nx()) {
        issues.push_back("pmf row count != |x_alphabet|");
        return issues;  // shape broken; stop before indexing out of range
    }
    N sum = T::zero();
    for (int x = 0; x < m.nx(); ++x) {
        if (static_cast<int>(m.pmf[x].size()) != m.ny()) {
            issues.push_back("pmf row " + std::to_string(x) + " has wrong length");
            return issues;
        }
        for (int y = 0; y < m.ny(); ++y) {
            if (T::lt(m.pmf[x][y], T::zero()))
                issues.push_back("negative mass at pmf[" + std::to_string(x) + "][" +
                                 std::to_string(y) + "]");
            sum += m.pmf[x][y];
        }
    }
    if (!T::eq(sum, T::one())) issues.push_back("mass sum != 1 (sum = " + T::str(sum) + ")");
    return issues;
}

// ---------------------------------------------------------------------------
// Stopping rules: the tracked stopping time S, given by its cumulative
// conditional law q(x^n) = P(S <= n | X^n = x^n). The horizon override
// (q = 1 at n >= kappa) is applied by consumers via effective_q, never stored.
// ---------------------------------------------------------------------------

enum class RuleKind { first_hit, sum_threshold, table_prefix, table_composition };

template <class N>
struct StoppingRule {
    RuleKind kind = RuleKind::first_hit;
    // first_hit: S = first i with X_i in targets (else kappa via override).
    std::vector<int> targets;  // x indices, sorted, unique
    // sum_threshold: S = first n with sum_{i<=n} weights[X_i] > threshold.
    std::vector<long> weights;  // indexed by x
    long threshold = 0;
    // table_prefix: q(x^n) = value of the longest tabulated prefix (root
    // default 0). Keys are nonempty x-index byte strings.
    std::map<std::string, N> prefix_entries;
    // table_composition: q(x^n) = max over tabulated sub-compositions of the
    // composition of x^n (root default 0). Keys are |X|-long count vectors.
    std::map<std::vector<int>, N> comp_entries;
};

template <class N>
StoppingRule<N> make_first_hit(std::vector<int> targets) {
    StoppingRule<N> r;
    r.kind = RuleKind::first_hit;
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    r.targets = std::move(targets);
    return r;
}

template <class N>
StoppingRule<N> make_sum_threshold(std::vector<long> weights, long threshold) {
    StoppingRule<N> r;
    r.kind = RuleKind::sum_threshold;
    r.weights = std::move(weights);
    r.threshold = threshold;
    return r;
}

template <class N>
StoppingRule<N> make_table_prefix(std::map<std::string, N> entries) {
    StoppingRule<N> r;
    r.kind = RuleKind::table_prefix;
    r.prefix_entries = std::move(entries);
    return r;
}

template <class N>
StoppingRule<N> make_table_composition(std::map<std::vector<int>, N> entries) {
    StoppingRule<N> r;
    r.kind = RuleKind::table_composition;
    r.comp_entries = std::move(entries);
    return r;
}

// q_eff over the composition DAG: max of tabulated values over sub-compositions.
template <class N>
N comp_qeff(const StoppingRule<N>& rule, const std::vector<int>& counts,
            std::map<std::vector<int>, N>& memo) {
    auto mit = memo.find(counts);
    if (mit != memo.end()) return mit->second;
    N best = numeric_traits<N>::zero();
    auto eit = rule.comp_entries.find(counts);
    if (eit != rule.comp_entries.end()) best = eit->second;
    std::vector<int> sub = counts;
    for (std::size_t g = 0; g < counts.size(); ++g) {
        if (counts[g] == 0) continue;
        --sub[g];
        N v = comp_qeff(rule, sub, memo);
        ++sub[g];
        if (numeric_traits<N>::lt(best, v)) best = v;
    }
    memo.emplace(counts, best);
    return best;
}

// Raw rule law q(x^n) = P(S <= n | X^n), *without* the horizon override.
template <class N>
N rule_q(const StoppingRule<N>& rule, const std::string& xbytes, int nx) {
    using T = numeric_traits<N>;
    switch (rule.kind) {
        case RuleKind::first_hit:
            for (char c : xbytes)
                if (std::binary_search(rule.targets.begin(), rule.targets.end(),
                                       static_cast<int>(static_cast<unsigned char>(c))))
                    return T::one();
            return T::zero();
        case RuleKind::sum_threshold: {
            long s = 0;
            for (char c : xbytes) {
                s += rule.weights[static_cast<unsigned char>(c)];
                if (s > rule.threshold) return T::one();
            }
            return T::zero();
        }
        case RuleKind::table_prefix: {
            for (std::size_t len = xbytes.size(); len >= 1; --len) {
                auto it = rule.prefix_entries.find(xbytes.substr(0, len));
                if (it != rule.prefix_entries.end()) return it->second;
            }
            return T::zero();
        }
        case RuleKind::table_composition: {
            std::vector<int> counts(nx, 0);
            for (char c : xbytes) ++counts[static_cast<unsigned char>(c)];
            std::map<std::vector<int>, N> memo;
            return comp_qeff(rule, counts, memo);
        }
    }
    return T::zero();
}

// q with the horizon override: S <= kappa almost surely.
template <class N>
N effective_q(const StoppingRule<N>& rule, const std::string& xbytes, int nx, int kappa) {
    if (static_cast<int>(xbytes.size()) >= kappa) return numeric_traits<N>::one();
    return rule_q(rule, xbytes, nx);
}

template <class N>
std::vector<std::string> validate_rule(const JointModel<N>& m, const StoppingRule<N>& rule) {
    using T = numeric_traits<N>;
    std::vector<std::string> issues;
    auto check_q = [&](const N& q, const std::string& where) {
        if (T::lt(q, T::zero()) || T::lt(T::one(), q))
            issues.push_back("rule: q outside [0,1] at " + where);
    };
    switch (rule.kind) {
        case RuleKind::first_hit:
            for (int t : rule.targets)
                if (t < 0 || t >= m.nx()) issues.push_back("rule: target index out of range");
            break;
        case RuleKind::sum_threshold:
            if (static_cast<int>(rule.weights.size()) != m.nx())
                issues.push_back("rule: weights size != |x_alphabet|");
            break;
        case RuleKind::table_prefix:
            for (const auto& [key, q] : rule.prefix_entries) {
                if (key.empty()) {
                    issues.push_back("rule: empty prefix key (root q is fixed at 0)");
                    continue;
                }
                for (char c : key)
                    if (static_cast<unsigned char>(c) >= static_cast<unsigned>(m.nx())) {
                        issues.push_back("rule: prefix key uses out-of-range x symbol");
                        break;
                    }
                check_q(q, "prefix entry");
                // monotone against the longest tabulated proper ancestor
                for (std::size_t len = key.size() - 1; len >= 1; --len) {
                    auto it = rule.prefix_entries.find(key.substr(0, len));
                    if (it != rule.prefix_entries.end()) {
                        if (T::lt(q, it->second))
                            issues.push_back("rule: non-monotone prefix table at key of length " +
                                             std::to_string(key.size()));
                        break;
                    }
                }
            }
            break;
        case RuleKind::table_composition:
            for (const auto& [c, q] : rule.comp_entries) {
                if (static_cast<int>(c.size()) != m.nx()) {
                    issues.push_back("rule: composition key size != |x_alphabet|");
                    continue;
                }
                long total = 0;
                for (int v : c) {
                    if (v < 0) issues.push_back("rule: negative count in composition key");
                    total += v;
                }
                if (total == 0) issues.push_back("rule: empty composition key (root q is fixed at 0)");
                check_q(q, "composition entry");
                // monotone against every tabulated sub-composition
                for (const auto& [c2, q2] : rule.comp_entries) {
                    if (c2 == c || c2.size() != c.size()) continue;
                    bool subset = true;
                    for (std::size_t i = 0; i < c.size(); ++i)
                        if (c2[i] > c[i]) { subset = false; break; }
                    if (subset && T::lt(q, q2))
                        issues.push_back("rule: non-monotone composition table");
                }
            }
            break;
    }
    return issues;
}

// ---------------------------------------------------------------------------
// State machine: finite-state evaluation of q along x-paths, enabling
// polynomial node statistics. Simulating the machine along x^n reproduces
// q(x^n) exactly (see unit tests).
// ---------------------------------------------------------------------------

template <class N>
struct StateMachine {
    int n_states = 0;
    int init = 0;
    std::vector<std::vector<int>> next;  // next[state][x]
    std::vector<N> stop;                 // q value represented by the state
};

namespace detail {
constexpr long kStateBudget = 1'000'000;
}

template <class N>
StateMachine<N> build_state_machine(const JointModel<N>& m, const StoppingRule<N>& rule) {
    using T = numeric_traits<N>;
    {
        auto issues = validate_rule(m, rule);
        if (!issues.empty()) throw std::invalid_argument("invalid rule: " + issues.front());
    }
    StateMachine<N> sm;
    const int nx = m.nx();
    switch (rule.kind) {
        case RuleKind::first_hit: {
            sm.n_states = 2;
            sm.init = 0;
            sm.stop = {T::zero(), T::one()};
            sm.next.assign(2, std::vector<int>(nx, 1));
            for (int x = 0; x < nx; ++x)
                sm.next[0][x] =
                    std::binary_search(rule.targets.begin(), rule.targets.end(), x) ? 1 : 0;
            break;
        }
        case RuleKind::sum_threshold: {
            long minw = 0, maxw = 0;
            for (long w : rule.weights) {
                minw = std::min(minw, w);
                maxw = std::max(maxw, w);
            }
            const long lo = static_cast<long>(m.kappa) * minw;  // lowest reachable sum (<= 0)
            const long hi = static_cast<long>(m.kappa) * maxw;
            if (hi <= rule.threshold) {
                // the threshold is unreachable within the horizon: S = kappa a.s.
                sm.n_states = 1;
                sm.init = 0;
                sm.stop = {T::zero()};
                sm.next.assign(1, std::vector<int>(nx, 0));
                break;
            }
            const long span = rule.threshold - lo + 1;  // sums lo..threshold, plus "stopped"
            if (span < 0 || span + 1 > detail::kStateBudget)
                throw RefusalError("sum_threshold state space too large (" +
                                   std::to_string(span + 1) + " states exceeds budget)");
            const int stopped = static_cast<int>(span);
            sm.n_states = stopped + 1;
            sm.stop.assign(sm.n_states, T::zero());
            sm.stop[stopped] = T::one();
            sm.next.assign(sm.n_states, std::vector<int>(nx, stopped));
            for (long s = lo; s <= rule.threshold; ++s) {
                const int sid = static_cast<int>(s - lo);
                for (int x = 0; x < nx; ++x) {
                    long s2 = s + rule.weights[x];
                    if (s2 > rule.threshold)
                        sm.next[sid][x] = stopped;
                    else
                        sm.next[sid][x] = static_cast<int>(std::max(s2, lo) - lo);
                }
            }
            for (int x = 0; x < nx; ++x) sm.next[stopped][x] = stopped;
            sm.init = static_cast<int>(0 - lo);
            break;
        }
        case RuleKind::table_prefix: {
            // Trie over all prefixes of tabulated keys + one absorbing state
            // per distinct inherited q value for strings that left the trie.
            std::map<std::string, int> trie;  // prefix -> state id
            trie[""] = 0;
            for (const auto& [key, q] : rule.prefix_entries) {
                (void)q;
                for (std::size_t len = 1; len <= key.size(); ++len)
                    trie.emplace(key.substr(0, len), 0);
                if (static_cast<long>(trie.size()) > detail::kStateBudget)
                    throw RefusalError("prefix table trie exceeds state budget");
            }
            int id = 0;
            for (auto& [key, sid] : trie) sid = id++;
            const int ntrie = id;
            // inherited q per trie node (map order = shortlex? No: std::map is
            // lexicographic, which visits prefixes before extensions — safe.)
            std::vector<N> qeff(ntrie, T::zero());
            for (const auto& [key, sid] : trie) {
                if (key.empty()) continue;
                N inherited = T::zero();
                auto pit = trie.find(key.substr(0, key.size() - 1));
                inherited = qeff[pit->second];
                auto eit = rule.prefix_entries.find(key);
                qeff[sid] = eit != rule.prefix_entries.end() ? eit->second : inherited;
            }
            std::map<std::string, int> absorb;  // q.str() -> state id (dedup key)
            std::vector<N> absorb_q;
            auto absorb_state = [&](const N& q) {
                std::string k = T::str(q);
                auto it = absorb.find(k);
                if (it != absorb.end()) return it->second;
                int s = ntrie + static_cast<int>(absorb_q.size());
                absorb.emplace(k, s);
                absorb_q.push_back(q);
                return s;
            };
            std::vector<std::vector<int>> next(ntrie, std::vector<int>(nx, -1));
            for (const auto& [key, sid] : trie) {
                for (int x = 0; x < nx; ++x) {
                    std::string child = key + static_cast<char>(x);
                    auto cit = trie.find(child);
                    next[sid][x] = cit != trie.end() ? cit->second : absorb_state(qeff[sid]);
                }
            }
            sm.n_states = ntrie + static_cast<int>(absorb_q.size());
            sm.init = trie[""];
            sm.stop = qeff;
            sm.stop.insert(sm.stop.end(), absorb_q.begin(), absorb_q.end());
            sm.next = std::move(next);
            sm.next.resize(sm.n_states);
            for (int s = ntrie; s < sm.n_states; ++s) sm.next[s].assign(nx, s);
            break;
        }
        case RuleKind::table_composition: {
            // One state per x-composition of size < kappa, plus a sink for
            // depth >= kappa (whose q the horizon override makes irrelevant).
            std::vector<std::vector<int>> comps;
            std::map<std::vector<int>, int> index;
            std::vector<int> zero(nx, 0);
            comps.push_back(zero);
            index.emplace(zero, 0);
            for (std::size_t head = 0; head < comps.size(); ++head) {
                std::vector<int> c = comps[head];
                long total = 0;
                for (int v : c) total += v;
                if (total + 1 >= m.kappa) continue;  // children would reach depth kappa
                for (int x = 0; x < nx; ++x) {
                    ++c[x];
                    if (!index.count(c)) {
                        if (static_cast<long>(comps.size()) >= detail::kStateBudget)
                            throw RefusalError("composition state space exceeds budget");
                        index.emplace(c, static_cast<int>(comps.size()));
                        comps.push_back(c);
                    }
                    --c[x];
                }
            }
            const int sink = static_cast<int>(comps.size());
            sm.n_states = sink + 1;
            sm.init = 0;
            sm.stop.assign(sm.n_states, T::one());  // sink q = 1 (depth >= kappa)
            sm.next.assign(sm.n_states, std::vector<int>(nx, sink));
            std::map<std::vector<int>, N> memo;
            for (int s = 0; s < sink; ++s) {
                sm.stop[s] = comp_qeff(rule, comps[s], memo);
                std::vector<int> c = comps[s];
                for (int x = 0; x < nx; ++x) {
                    ++c[x];
                    auto it = index.find(c);
                    sm.next[s][x] = it != index.end() ? it->second : sink;
                    --c[x];
                }
            }
            break;
        }
    }
    return sm;
}

// ---------------------------------------------------------------------------
// NodeStats and the path engine (division-free joint-mass recursions).
// ---------------------------------------------------------------------------

template <class N>
struct NodeStats {
    N w, a, b;  // P(Y^n=y^n), alarm mass a(y), delay mass b(y)
};

template <class N>
struct PathCtx {
    int n = 0;
    N w;      // P(Y^n = y^n)
    N bmass;  // b(y^n)
    std::vector<N> spj;  // spj[s] = P(state(X^n) = s, Y^n = y^n)
};

template <class N>
class Engine {
    using T = numeric_traits<N>;

public:
    Engine(const JointModel<N>& m, const StoppingRule<N>& rule)
        : model_(m), sm_(build_state_machine(m, rule)), py_(m.py()) {
        // nextstop[s] = E_x stop(next(s, X)) with X ~ marginal px
        std::vector<N> px = m.px();
        nextstop_.assign(sm_.n_states, T::zero());
        for (int s = 0; s < sm_.n_states; ++s)
            for (int x = 0; x < m.nx(); ++x) nextstop_[s] += px[x] * sm_.stop[sm_.next[s][x]];
    }

    const JointModel<N>& model() const { return model_; }
    const StateMachine<N>& machine() const { return sm_; }

    PathCtx<N> root() const {
        PathCtx<N> c;
        c.n = 0;
        c.w = T::one();
        c.bmass = T::zero();
        c.spj.assign(sm_.n_states, T::zero());
        c.spj[sm_.init] = T::one();
        return c;
    }

    // Joint mass w * P(S <= n | Y^n = y^n); S >= 1 and S <= kappa enforced here.
    N wps(const PathCtx<N>& c) const {
        if (c.n == 0) return T::zero();
        if (c.n >= model_.kappa) return c.w;
        N s = T::zero();
        for (int i = 0; i < sm_.n_states; ++i) s += c.spj[i] * sm_.stop[i];
        return s;
    }

    // Joint mass w * P(S = n+1 | Y^n = y^n).
    N wpnext(const PathCtx<N>& c) const {
        N nextmass;
        if (c.n + 1 >= model_.kappa) {
            nextmass = c.w;
        } else {
            nextmass = T::zero();
            for (int i = 0; i < sm_.n_states; ++i) nextmass += c.spj[i] * nextstop_[i];
        }
        return nextmass - wps(c);
    }

    NodeStats<N> stats(const PathCtx<N>& c) const { return {c.w, c.w - wps(c), c.bmass}; }

    PathCtx<N> child(const PathCtx<N>& c, int gamma) const {
        if (gamma < 0 || gamma >= model_.ny()) throw std::invalid_argument("y symbol out of range");
        if (c.n >= model_.kappa) throw std::invalid_argument("path beyond horizon");
        PathCtx<N> d;
        d.n = c.n + 1;
        d.w = c.w * py_[gamma];
        d.bmass = (c.bmass + wps(c)) * py_[gamma];
        d.spj.assign(sm_.n_states, T::zero());
        for (int s = 0; s < sm_.n_states; ++s) {
            if (T::is_zero(c.spj[s])) continue;
            for (int x = 0; x < model_.nx(); ++x)
                d.spj[sm_.next[s][x]] += c.spj[s] * model_.pmf[x][gamma];
        }
        return d;
    }

    PathCtx<N> walk(const std::string& ybytes) const {
        PathCtx<N> c = root();
        for (char ch : ybytes) c = child(c, static_cast<unsigned char>(ch));
        return c;
    }

private:
    JointModel<N> model_;
    StateMachine<N> sm_;
    std::vector<N> py_;
    std::vector<N> nextstop_;
};

// P(S <= k | Y^n = y^n) for k <= n; by the prefix property of S this equals
// P(S <= k | Y^k = y^k), which is how it is computed.
template <class N>
N stop_cdf_given_y(const JointModel<N>& m, const StoppingRule<N>& rule, const std::string& ybytes,
                   int k) {
    using T = numeric_traits<N>;
    const int n = static_cast<int>(ybytes.size());
    if (n > m.kappa) throw std::invalid_argument("y-prefix longer than kappa");
    if (k < 0 || k > n) throw std::invalid_argument("k must satisfy 0 <= k <= length(y)");
    Engine<N> eng(m, rule);
    PathCtx<N> full = eng.walk(ybytes);
    if (T::is_zero(full.w))
        throw std::invalid_argument("conditioning on zero-probability y-prefix");
    if (k == 0) return T::zero();
    PathCtx<N> pre = eng.walk(ybytes.substr(0, k));
    return eng.wps(pre) / pre.w;
}

template <class N>
NodeStats<N> node_stats(const JointModel<N>& m, const StoppingRule<N>& rule,
                        const std::string& ybytes) {
    if (static_cast<int>(ybytes.size()) > m.kappa)
        throw std::invalid_argument("y-prefix longer than kappa");
    Engine<N> eng(m, rule);
    return eng.stats(eng.walk(ybytes));
}

// E(kappa - S) = sum_{k=1}^{kappa-1} P(S <= k), via a state-distribution DP
// over the x-marginal (no y involved). Used as an independent cross-check of
// the complete tree's delay.
template <class N>
N expected_slack(const JointModel<N>& m, const StoppingRule<N>& rule) {
    using T = numeric_traits<N>;
    StateMachine<N> sm = build_state_machine(m, rule);
    std::vector<N> px = m.px();
    std::vector<N> dist(sm.n_states, T::zero());
    dist[sm.init] = T::one();
    N total = T::zero();
    for (int k = 1; k < m.kappa; ++k) {
        std::vector<N> next(sm.n_states, T::zero());
        for (int s = 0; s < sm.n_states; ++s) {
            if (T::is_zero(dist[s])) continue;
            for (int x = 0; x < m.nx(); ++x) next[sm.next[s][x]] += dist[s] * px[x];
        }
        dist = std::move(next);
        for (int s = 0; s < sm.n_states; ++s) total += dist[s] * sm.stop[s];
    }
    return total;
}

// Label-text -> y-index byte string. Accepts concatenated single-character
// labels when every label is one character, else comma-separated labels.
template <class N>
std::string parse_y_string(const JointModel<N>& m, const std::string& text) {
    std::string out;
    if (text.empty()) return out;
    bool all_single = true;
    for (const auto& l : m.y_labels)
        if (l.size() != 1) all_single = false;
    if (all_single && text.find(',') == std::string::npos) {
        for (char c : text) {
            int idx = m.y_index(std::string(1, c));
            if (idx < 0) throw std::invalid_argument("unknown y symbol '" + std::string(1, c) + "'");
            out.push_back(static_cast<char>(idx));
        }
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        int idx = m.y_index(tok);
        if (idx < 0) throw std::invalid_argument("unknown y symbol '" + tok + "'");
        out.push_back(static_cast<char>(idx));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// Human-readable form of a y-index byte string (for labels/DOT output).
template <class N>
std::string format_y_string(const JointModel<N>& m, const std::string& ybytes) {
    bool all_single = true;
    for (const auto& l : m.y_labels)
        if (l.size() != 1) all_single = false;
    std::string out;
    for (std::size_t i = 0; i < ybytes.size(); ++i) {
        if (i && !all_single) out += ",";
        out += m.y_labels[static_cast<unsigned char>(ybytes[i])];
    }
    return out;
}

}  // namespace tst
