#include "vrs/resampler.hpp"

#include <cmath>

#include "vrs/errors.hpp"

namespace vrs {

ResampledProposal::ResampledProposal(const Proposal& proposal, const LatentModel& model, double threshold,
                                     std::size_t max_attempts)
    : proposal_(&proposal), model_(&model), threshold_(threshold), max_attempts_(max_attempts) {
    if (std::isnan(threshold) || threshold == -kInf) {
        throw PreconditionError("ResampledProposal: threshold must be finite or +inf");
    }
    if (max_attempts == 0) throw PreconditionError("ResampledProposal: max_attempts must be positive");
}

double ResampledProposal::log_ratio(ObsView x, LatentView z) const {
    if (rejection_disabled()) return -kInf;
    return log_ratio_from(model_->log_joint(x, z), proposal_->log_prob(x, z), threshold_);
}

double ResampledProposal::log_accept_prob(ObsView x, LatentView z) const {
    return log_accept_from_ratio(log_ratio(x, z));
}

double ResampledProposal::log_unnorm_density(ObsView x, LatentView z) const {
    return proposal_->log_prob(x, z) + log_accept_prob(x, z);
}

Draw ResampledProposal::sample(ObsView x, Rng& rng) const {
    for (std::size_t attempt = 1; attempt <= max_attempts_; ++attempt) {
        Draw d;
        d.z = proposal_->sample(x, rng);
        d.attempts = attempt;
        d.log_p = model_->log_joint(x, d.z);
        d.log_q = proposal_->log_prob(x, d.z);
        if (rejection_disabled()) return d;
        const double log_a = log_accept_from_ratio(log_ratio_from(d.log_p, d.log_q, threshold_));
        if (std::log(uniform01(rng)) < log_a) return d;
    }
    throw BudgetExhausted(max_attempts_, "threshold " + std::to_string(threshold_));
}

SampleBatch ResampledProposal::sample_batch(ObsView x, Rng& rng, std::size_t count) const {
    SampleBatch batch;
    batch.accepted.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Draw d = sample(x, rng);
        batch.attempts += d.attempts;
        batch.accepted.push_back(std::move(d.z));
    }
    return batch;
}

double ResampledProposal::estimate_log_ZR(ObsView x, Rng& rng, std::size_t n) const {
    if (n == 0) throw PreconditionError("estimate_log_ZR: need at least one sample");
    if (rejection_disabled()) return 0.0;
    std::vector<double> log_a(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Latent z = proposal_->sample(x, rng);
        log_a[i] = log_accept_prob(x, z);
    }
    return n == 1 ? log_a[0] : log_mean_exp(log_a);
}

}  // namespace vrs
