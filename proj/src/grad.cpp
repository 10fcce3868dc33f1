#include "vrs/grad.hpp"

#include <numeric>

#include "vrs/errors.hpp"

namespace vrs {

namespace {

void require_pairs(std::size_t a, std::size_t b) {
    if (a != b) throw ShapeError("leave_one_out_cov: a and b differ in length");
    if (a < 2) throw PreconditionError("leave_one_out_cov: need S >= 2 samples");
}

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

SignalPair signal_pair(const ResampledProposal& rp, ObsView x, LatentView z) {
    const double log_p = rp.model().log_joint(x, z);
    const double log_q = rp.proposal().log_prob(x, z);
    SignalPair s;
    s.l = log_ratio_from(log_p, log_q, rp.threshold());
    s.A = learning_signal(log_p, log_q, rp.threshold());
    s.sigma = sigmoid(s.l);
    s.B_theta_direct = rp.model().grad_log_joint(x, z);
    s.B_theta_cov = s.sigma * s.B_theta_direct;
    s.B_phi = (1.0 - s.sigma) * rp.proposal().grad_log_prob(x, z);
    return s;
}

double leave_one_out_cov(std::span<const double> a, std::span<const double> b) {
    require_pairs(a.size(), b.size());
    const double m = mean(a);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - m) * b[i];
    return s / static_cast<double>(a.size() - 1);
}

ParamVector leave_one_out_cov(std::span<const double> a, std::span<const ParamVector> b) {
    require_pairs(a.size(), b.size());
    const double m = mean(a);
    const double inv = 1.0 / static_cast<double>(a.size() - 1);
    ParamVector out = ParamVector::zeros_like(b[0]);
    for (std::size_t i = 0; i < a.size(); ++i) out.add_scaled((a[i] - m) * inv, b[i]);
    return out;
}

EstimateStats accumulate_relbo_grad(const ResampledProposal& rp, ObsView x, std::span<const Draw> draws,
                                    double scale, ParamVector& d_theta, ParamVector& d_phi) {
    const std::size_t S = draws.size();
    if (S < 2) throw PreconditionError("relbo gradient: need S >= 2 samples");
    const double T = rp.threshold();
    std::vector<double> A(S);
    std::vector<double> sig(S);
    EstimateStats stats;
    for (std::size_t i = 0; i < S; ++i) {
        A[i] = learning_signal(draws[i].log_p, draws[i].log_q, T);
        sig[i] = sigmoid(log_ratio_from(draws[i].log_p, draws[i].log_q, T));
        stats.attempts += draws[i].attempts;
        stats.signal_sum += A[i];
    }
    stats.sample_count = S;
    const double m = mean(A);
    const double inv_cov = 1.0 / static_cast<double>(S - 1);
    const double inv_mean = 1.0 / static_cast<double>(S);
    for (std::size_t i = 0; i < S; ++i) {
        const double c = (A[i] - m) * inv_cov;
        const double coef_phi = c * (1.0 - sig[i]);
        const double coef_theta = inv_mean + c * sig[i];
        if (coef_phi != 0.0 && !d_phi.empty()) {
            rp.proposal().accumulate_grad_log_prob(x, draws[i].z, scale * coef_phi, d_phi);
        }
        if (coef_theta != 0.0 && !d_theta.empty()) {
            rp.model().accumulate_grad_log_joint(x, draws[i].z, scale * coef_theta, d_theta);
        }
    }
    return stats;
}

GradEstimate relbo_grad_estimate(const ResampledProposal& rp, ObsView x, Rng& rng, std::size_t S) {
    if (S < 2) throw PreconditionError("relbo_grad_estimate: need S >= 2 samples");
    std::vector<Draw> draws;
    draws.reserve(S);
    for (std::size_t i = 0; i < S; ++i) draws.push_back(rp.sample(x, rng));
    GradEstimate g;
    g.d_theta = ParamVector(rp.model().params().layout());
    g.d_phi = ParamVector(rp.proposal().params().layout());
    const auto stats = accumulate_relbo_grad(rp, x, draws, 1.0, g.d_theta, g.d_phi);
    g.sample_count = stats.sample_count;
    g.attempts = stats.attempts;
    g.signal_mean = stats.signal_sum / static_cast<double>(S);
    return g;
}

UnnormElboEstimate unnormalized_elbo_grads(std::span<const UnnormSample> samples, double log_ZR) {
    const std::size_t S = samples.size();
    if (S < 2) throw PreconditionError("unnormalized_elbo_grads: need S >= 2 samples");
    std::vector<double> signal(S);
    for (std::size_t i = 0; i < S; ++i) signal[i] = samples[i].log_gamma_p - samples[i].log_gamma_r;
    const double m = mean(signal);
    const double inv = 1.0 / static_cast<double>(S - 1);
    UnnormElboEstimate out;
    out.elbo = m + log_ZR;
    out.d_params = ParamVector::zeros_like(samples[0].grad_log_gamma_r);
    for (std::size_t i = 0; i < S; ++i) {
        out.d_params.add_scaled((signal[i] - m) * inv, samples[i].grad_log_gamma_r);
        if (!samples[i].grad_log_gamma_p.empty()) {
            out.d_params.add_scaled(1.0 / static_cast<double>(S), samples[i].grad_log_gamma_p);
        }
    }
    return out;
}

}  // namespace vrs
