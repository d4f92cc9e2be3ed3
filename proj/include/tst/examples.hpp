#pragma once

#include <stdexcept>

#include "tst/model.hpp"

namespace tst {

template <class N>
struct ModelAndRule {
    JointModel<N> model;
    StoppingRule<N> rule;
};

namespace detail {
template <class N>
void require_open01(const N& v, const char* name) {
    using T = numeric_traits<N>;
    if (!T::lt(T::zero(), v) || !T::lt(v, T::one()))
        throw std::invalid_argument(std::string(name) + " must lie in (0,1)");
}
inline void require_kappa(int kappa) {
    if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
}
}  // namespace detail

// Fair Bernoulli X observed through a BSC(p); S stops right after the first
// symbol iff X_1 = 1 (a genuinely order-dependent prefix table).
template <class N>
ModelAndRule<N> ex6_bsc(const N& p, int kappa) {
    using T = numeric_traits<N>;
    detail::require_open01(p, "p");
    detail::require_kappa(kappa);
    JointModel<N> m;
    m.x_labels = {"0", "1"};
    m.y_labels = {"0", "1"};
    N half = T::from_ratio(1, 2);
    m.pmf = {{(T::one() - p) * half, p * half}, {p * half, (T::one() - p) * half}};
    m.kappa = kappa;
    std::map<std::string, N> entries;
    entries.emplace(std::string(1, static_cast<char>(1)), T::one());
    return {m, make_table_prefix<N>(std::move(entries))};
}

// Bernoulli(1 - eps) X observed through a BEC(p); S is the first 1 in X.
template <class N>
ModelAndRule<N> ex7_bec(const N& eps, const N& p, int kappa) {
    using T = numeric_traits<N>;
    detail::require_open01(eps, "eps");
    detail::require_open01(p, "p");
    detail::require_kappa(kappa);
    JointModel<N> m;
    m.x_labels = {"0", "1"};
    m.y_labels = {"0", "1", "e"};
    N one = T::one();
    m.pmf = {{eps * (one - p), T::zero(), eps * p},
             {T::zero(), (one - eps) * (one - p), (one - eps) * p}};
    m.kappa = kappa;
    return {m, make_first_hit<N>({1})};
}

// Bernoulli(x1) X observed through a BSC(p); S is the first 1 in X.
template <class N>
ModelAndRule<N> ex12_geometric(const N& x1, const N& p, int kappa) {
    using T = numeric_traits<N>;
    detail::require_open01(x1, "x1");
    detail::require_open01(p, "p");
    detail::require_kappa(kappa);
    JointModel<N> m;
    m.x_labels = {"0", "1"};
    m.y_labels = {"0", "1"};
    N one = T::one();
    m.pmf = {{(one - x1) * (one - p), (one - x1) * p}, {x1 * p, x1 * (one - p)}};
    m.kappa = kappa;
    return {m, make_first_hit<N>({1})};
}

// Bernoulli(x1) X observed through a BSC(p); S is the time of the second 1.
template <class N>
ModelAndRule<N> ex13_sum2(const N& x1, const N& p, int kappa) {
    using T = numeric_traits<N>;
    detail::require_open01(x1, "x1");
    detail::require_open01(p, "p");
    detail::require_kappa(kappa);
    JointModel<N> m;
    m.x_labels = {"0", "1"};
    m.y_labels = {"0", "1"};
    N one = T::one();
    m.pmf = {{(one - x1) * (one - p), (one - x1) * p}, {x1 * p, x1 * (one - p)}};
    m.kappa = kappa;
    return {m, make_sum_threshold<N>({0, 1}, 1)};
}

}  // namespace tst
