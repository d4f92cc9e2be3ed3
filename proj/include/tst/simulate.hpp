#pragma once

#include <cstdint>
#include <random>

#include "tst/tree.hpp"

namespace tst {

// Two-sided 99% normal quantile, for the confidence radii below.
inline constexpr double kZ99 = 2.5758293035489004;

struct SimResult {
    double alarm = 0.0;  // estimate of P(T < S)
    double delay = 0.0;  // estimate of E(T - S)^+
    double alarm_radius = 0.0;
    double delay_radius = 0.0;
};

// ---------------------------------------------------------------------------
// Monte Carlo cross-validation of a stopping tree: sample (X,Y) paths from
// the joint pmf, draw S from the rule's conditional law along the X path,
// read T off the tree along the Y path, and average. Everything downstream
// of the pmf is plain double; exactness is the solver's job, this is the
// sanity harness. Deterministic for a fixed seed: mt19937_64 with an
// explicit bits-to-double map, no distribution adapters.
// ---------------------------------------------------------------------------
template <class N>
SimResult simulate(const JointModel<N>& m, const StoppingRule<N>& rule,
                   const StoppingTree<N>& tree, long samples, std::uint64_t seed) {
    using T = numeric_traits<N>;
    if (samples <= 0) throw std::invalid_argument("simulate needs a positive sample count");
    {
        auto issues = validate_model(m);
        if (!issues.empty()) throw std::invalid_argument("invalid model: " + issues.front());
        auto rissues = validate_rule(m, rule);
        if (!rissues.empty()) throw std::invalid_argument("invalid rule: " + rissues.front());
    }
    if (tree.kappa != m.kappa)
        throw std::invalid_argument("tree horizon does not match the model");

    const int nx = m.nx(), ny = m.ny(), kappa = m.kappa;

    // flattened joint cdf over (x,y) pairs, row-major in x
    std::vector<double> cdf(static_cast<std::size_t>(nx) * ny);
    {
        double acc = 0.0;
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                acc += T::to_double(m.pmf[x][y]);
                cdf[static_cast<std::size_t>(x) * ny + y] = acc;
            }
        cdf.back() = 1.0;  // absorb float rounding in the last cell
    }

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

    long alarms = 0;
    double delay_sum = 0.0, delay_sq = 0.0;
    std::string xpath, ypath;
    for (long s = 0; s < samples; ++s) {
        xpath.clear();
        ypath.clear();
        for (int i = 0; i < kappa; ++i) {
            double u = uniform();
            std::size_t cell =
                std::lower_bound(cdf.begin(), cdf.end(), u,
                                 [](double c, double v) { return c <= v; }) -
                cdf.begin();
            if (cell >= cdf.size()) cell = cdf.size() - 1;
            xpath.push_back(static_cast<char>(cell / ny));
            ypath.push_back(static_cast<char>(cell % ny));
        }
        // S by inverse cdf: the rule exposes q(x^n) = P(S <= n | X), which is
        // nondecreasing with q(x^kappa) = 1, so one uniform pins S down
        double us = uniform();
        int S = kappa;
        for (int n = 1; n <= kappa; ++n) {
            if (us < T::to_double(effective_q(rule, xpath.substr(0, n), nx, kappa))) {
                S = n;
                break;
            }
        }
        int stop = induced_stop(tree, ypath);
        if (stop < S) ++alarms;
        double d = stop > S ? static_cast<double>(stop - S) : 0.0;
        delay_sum += d;
        delay_sq += d * d;
    }

    SimResult r;
    double n = static_cast<double>(samples);
    r.alarm = static_cast<double>(alarms) / n;
    r.delay = delay_sum / n;
    r.alarm_radius = kZ99 * std::sqrt(r.alarm * (1.0 - r.alarm) / n);
    double var = samples > 1 ? (delay_sq - n * r.delay * r.delay) / (n - 1.0) : 0.0;
    if (var < 0.0) var = 0.0;  // float cancellation guard
    r.delay_radius = kZ99 * std::sqrt(var / n);
    return r;
}

}  // namespace tst
