#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vrs/param_vector.hpp"
#include "vrs/resampler.hpp"

namespace vrs {

// Learning signal A = log p - log q + softplus(l), i.e. log gamma_p - log gamma_r
// for gamma_r = q * a. At T = +inf it is the plain ELBO integrand.
inline double learning_signal(double log_p, double log_q, double threshold) {
    return log_p - log_q + softplus(log_ratio_from(log_p, log_q, threshold));
}

// Per-sample ingredients of the R-ELBO gradient.
struct SignalPair {
    double A = 0.0;
    double l = 0.0;
    double sigma = 0.0;              // sigmoid(l); 0 when T = +inf
    ParamVector B_phi;               // (1 - sigma) grad_phi log q
    ParamVector B_theta_cov;         // sigma grad_theta log p
    ParamVector B_theta_direct;      // grad_theta log p
};

SignalPair signal_pair(const ResampledProposal& rp, ObsView x, LatentView z);

// (1 / (S - 1)) sum_i (a_i - mean(a)) b_i. Requires S >= 2.
double leave_one_out_cov(std::span<const double> a, std::span<const double> b);
ParamVector leave_one_out_cov(std::span<const double> a, std::span<const ParamVector> b);

struct GradEstimate {
    ParamVector d_theta;
    ParamVector d_phi;
    std::size_t sample_count = 0;
    std::size_t attempts = 0;
    double signal_mean = 0.0;
};

// Sampling statistics of one accumulate call.
struct EstimateStats {
    std::size_t sample_count = 0;
    std::size_t attempts = 0;
    double signal_sum = 0.0;
};

// Draws S samples from R and estimates
//   d_phi   = COV_R(A, (1 - sigma) grad_phi log q)
//   d_theta = E_R[grad_theta log p] + COV_R(A, sigma grad_theta log p)
// with the leave-one-out covariance estimator. Requires S >= 2.
GradEstimate relbo_grad_estimate(const ResampledProposal& rp, ObsView x, Rng& rng, std::size_t S);

// Same estimator from already drawn samples, written straight into
// d_theta/d_phi scaled by `scale` without materializing per-sample vectors.
EstimateStats accumulate_relbo_grad(const ResampledProposal& rp, ObsView x, std::span<const Draw> draws,
                                    double scale, ParamVector& d_theta, ParamVector& d_phi);

// General unnormalized-density estimator. Each sample z ~ R carries
// log gamma_p(z), log gamma_r(z), grad log gamma_r(z) and optionally
// grad log gamma_p(z) (empty vector when gamma_p does not depend on the params).
struct UnnormSample {
    double log_gamma_p = 0.0;
    double log_gamma_r = 0.0;
    ParamVector grad_log_gamma_r;
    ParamVector grad_log_gamma_p;
};

struct UnnormElboEstimate {
    double elbo = 0.0;  // mean(log gamma_p - log gamma_r) + log Z_R
    ParamVector d_params;
};

// ELBO = E_R[log gamma_p - log gamma_r] + log Z_R and
// grad = E_R[grad log gamma_p] + COV_R(log gamma_p - log gamma_r, grad log gamma_r),
// estimated from S >= 2 samples; log_ZR is supplied by the caller.
UnnormElboEstimate unnormalized_elbo_grads(std::span<const UnnormSample> samples, double log_ZR);

}  // namespace vrs
