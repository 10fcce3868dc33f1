#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace vrs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^x), evaluated on the branch that cannot overflow.
inline double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log sigmoid(x) = -softplus(-x)
inline double log_sigmoid(double x) { return -softplus(-x); }

// Log-probability of a Bernoulli outcome given its logit.
inline double bernoulli_log_prob(double logit, int bit) {
    return bit ? log_sigmoid(logit) : log_sigmoid(-logit);
}

// log sum_i exp(v_i). Returns -inf for an empty range or all -inf inputs.
inline double log_sum_exp(std::span<const double> v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (m == -kInf) return -kInf;
    if (m == kInf) return kInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_mean_exp(std::span<const double> v) {
    return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

}  // namespace vrs
