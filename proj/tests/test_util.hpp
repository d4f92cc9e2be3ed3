#pragma once

// Shared test helpers: a deliberately blunt oracle that computes node
// statistics by enumerating *all* x-strings (no state machines, no joint-mass
// recursions, no prefix shortcuts), plus random model/rule generators.
// Oracle scope is small alphabets and kappa <= 6, where |X|^kappa stays tiny.

#include <random>
#include <string>
#include <vector>

#include "tst/model.hpp"

namespace tstest {

using tst::JointModel;
using tst::NodeStats;
using tst::Rat;
using tst::StoppingRule;

// Joint mass P(S <= k, Y^n = y^n): sum over full-length x-strings of
// q_eff(x^k) * prod_i pmf[x_i][y_i]. Independent of every production code
// path except rule_q / effective_q (the rule definition itself).
inline Rat oracle_joint_stop(const JointModel<Rat>& m, const StoppingRule<Rat>& rule,
                             const std::string& ybytes, int k) {
    const int n = static_cast<int>(ybytes.size());
    Rat total = 0;
    std::string x(n, '\0');
    // odometer enumeration of all x-strings of length n
    for (;;) {
        Rat mass = 1;
        for (int i = 0; i < n; ++i)
            mass = mass * m.pmf[static_cast<unsigned char>(x[i])][static_cast<unsigned char>(ybytes[i])];
        if (mass != Rat(0))
            total = total + mass * tst::effective_q(rule, x.substr(0, k), m.nx(), m.kappa);
        int pos = n - 1;
        while (pos >= 0 && static_cast<unsigned char>(x[pos]) == static_cast<unsigned>(m.nx()) - 1) {
            x[pos] = '\0';
            --pos;
        }
        if (pos < 0) break;
        ++x[pos];
    }
    return total;
}

inline NodeStats<Rat> oracle_node_stats(const JointModel<Rat>& m, const StoppingRule<Rat>& rule,
                                        const std::string& ybytes) {
    const int n = static_cast<int>(ybytes.size());
    std::vector<Rat> py = m.py();
    Rat w = 1;
    for (char c : ybytes) w = w * py[static_cast<unsigned char>(c)];
    NodeStats<Rat> s{w, 0, 0};
    if (w == Rat(0)) return s;  // dead branch convention: (0, 0, 0)
    s.a = w - oracle_joint_stop(m, rule, ybytes, n);
    for (int k = 1; k < n; ++k) s.b += oracle_joint_stop(m, rule, ybytes, k);
    return s;
}

// E(kappa - S) = sum_{k=1}^{kappa-1} P(S <= k), straight off the x-marginal.
inline Rat oracle_expected_slack(const JointModel<Rat>& m, const StoppingRule<Rat>& rule) {
    std::vector<Rat> px = m.px();
    Rat total = 0;
    for (int k = 1; k < m.kappa; ++k) {
        std::string x(k, '\0');
        for (;;) {
            Rat mass = 1;
            for (int i = 0; i < k; ++i) mass = mass * px[static_cast<unsigned char>(x[i])];
            total += mass * tst::effective_q(rule, x, m.nx(), m.kappa);
            int pos = k - 1;
            while (pos >= 0 &&
                   static_cast<unsigned char>(x[pos]) == static_cast<unsigned>(m.nx()) - 1) {
                x[pos] = '\0';
                --pos;
            }
            if (pos < 0) break;
            ++x[pos];
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Random instance generators (all masses are small-denominator rationals so
// exact arithmetic stays fast).
// ---------------------------------------------------------------------------

inline Rat random_fraction(std::mt19937_64& rng, int denom) {
    std::uniform_int_distribution<int> num(0, denom);
    return Rat(num(rng), denom);
}

// Random joint pmf over nx * ny cells: integer weights / common denominator,
// with an optional chance of structural zeros.
inline JointModel<Rat> random_model(std::mt19937_64& rng, int nx, int ny, int kappa,
                                    bool allow_zeros = true) {
    JointModel<Rat> m;
    for (int i = 0; i < nx; ++i) m.x_labels.push_back(std::string(1, static_cast<char>('a' + i)));
    for (int j = 0; j < ny; ++j) m.y_labels.push_back(std::string(1, static_cast<char>('0' + j)));
    m.kappa = kappa;
    std::uniform_int_distribution<int> cell(1, 12);
    std::uniform_int_distribution<int> zero(0, 4);
    for (;;) {
        long total = 0;
        std::vector<std::vector<long>> wts(nx, std::vector<long>(ny, 0));
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                long v = cell(rng);
                if (allow_zeros && zero(rng) == 0) v = 0;
                wts[i][j] = v;
                total += v;
            }
        if (total == 0) continue;
        // every x must retain mass (otherwise the alphabet is inflated), and
        // so must every y (dead y-symbols are legal but we want most tests to
        // exercise live trees; dead branches get dedicated tests).
        bool ok = true;
        for (int i = 0; i < nx && ok; ++i) {
            long row = 0;
            for (int j = 0; j < ny; ++j) row += wts[i][j];
            if (row == 0) ok = false;
        }
        if (!ok) continue;
        m.pmf.assign(nx, std::vector<Rat>(ny, Rat(0)));
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) m.pmf[i][j] = Rat(wts[i][j], total);
        return m;
    }
}

// Random monotone prefix table: children inherit the parent's q and move a
// random fraction of the remaining gap toward 1.
inline StoppingRule<Rat> random_prefix_rule(std::mt19937_64& rng, int nx, int kappa) {
    std::map<std::string, Rat> entries;
    std::uniform_int_distribution<int> denom(2, 6);
    std::uniform_int_distribution<int> keep(0, 2);
    struct Item {
        std::string key;
        Rat q;
    };
    std::vector<Item> frontier{{std::string(), Rat(0)}};
    int depth_cap = std::min(kappa - 1, 3);
    for (int depth = 1; depth <= depth_cap; ++depth) {
        std::vector<Item> next;
        for (const auto& it : frontier)
            for (int x = 0; x < nx; ++x) {
                Rat q = it.q + (Rat(1) - it.q) * random_fraction(rng, denom(rng));
                std::string key = it.key + static_cast<char>(x);
                if (keep(rng) != 0) entries.emplace(key, q);
                next.push_back({key, q});
            }
        frontier = std::move(next);
    }
    return tst::make_table_prefix<Rat>(std::move(entries));
}

// Random monotone composition table built level by level through the DAG.
inline StoppingRule<Rat> random_comp_rule(std::mt19937_64& rng, int nx, int kappa) {
    std::map<std::vector<int>, Rat> entries;
    std::map<std::vector<int>, Rat> qeff;  // running effective values
    qeff.emplace(std::vector<int>(nx, 0), Rat(0));
    std::uniform_int_distribution<int> denom(2, 6);
    std::uniform_int_distribution<int> keep(0, 2);
    int depth_cap = std::min(kappa - 1, 3);
    std::vector<std::vector<int>> level{std::vector<int>(nx, 0)};
    for (int depth = 1; depth <= depth_cap; ++depth) {
        std::map<std::vector<int>, Rat> next_level;
        for (const auto& c : level)
            for (int x = 0; x < nx; ++x) {
                std::vector<int> d = c;
                ++d[x];
                Rat parent_max = 0;
                for (int g = 0; g < nx; ++g) {
                    if (d[g] == 0) continue;
                    --d[g];
                    auto it = qeff.find(d);
                    if (it != qeff.end() && parent_max < it->second) parent_max = it->second;
                    ++d[g];
                }
                if (!next_level.count(d)) {
                    Rat q = parent_max + (Rat(1) - parent_max) * random_fraction(rng, denom(rng));
                    if (keep(rng) != 0)
                        entries.emplace(d, q);
                    else
                        q = parent_max;
                    next_level.emplace(d, q);
                }
            }
        level.clear();
        for (auto& [c, q] : next_level) {
            level.push_back(c);
            qeff.emplace(c, q);
        }
    }
    return tst::make_table_composition<Rat>(std::move(entries));
}

// Random structured rule (first_hit or sum_threshold).
inline StoppingRule<Rat> random_structured_rule(std::mt19937_64& rng, int nx) {
    std::uniform_int_distribution<int> kind(0, 1);
    if (kind(rng) == 0) {
        std::vector<int> targets;
        std::uniform_int_distribution<int> pick(0, 1);
        for (int x = 0; x < nx; ++x)
            if (pick(rng)) targets.push_back(x);
        return tst::make_first_hit<Rat>(std::move(targets));
    }
    std::uniform_int_distribution<int> wdist(0, 3);
    std::vector<long> weights;
    long total = 0;
    for (int x = 0; x < nx; ++x) {
        weights.push_back(wdist(rng));
        total += weights.back();
    }
    std::uniform_int_distribution<long> cdist(0, std::max<long>(1, total));
    return tst::make_sum_threshold<Rat>(std::move(weights), cdist(rng));
}

inline StoppingRule<Rat> random_rule(std::mt19937_64& rng, int nx, int kappa) {
    std::uniform_int_distribution<int> kind(0, 9);
    int k = kind(rng);
    if (k < 3) return random_prefix_rule(rng, nx, kappa);
    if (k < 6) return random_comp_rule(rng, nx, kappa);
    return random_structured_rule(rng, nx);
}

// Enumerate all y-strings (as index byte strings) of length <= depth.
inline std::vector<std::string> all_y_strings(int ny, int depth) {
    std::vector<std::string> out{std::string()};
    std::size_t level_start = 0;
    for (int d = 1; d <= depth; ++d) {
        std::size_t level_end = out.size();
        for (std::size_t i = level_start; i < level_end; ++i)
            for (int g = 0; g < ny; ++g) out.push_back(out[i] + static_cast<char>(g));
        level_start = level_end;
    }
    return out;
}

}  // namespace tstest
