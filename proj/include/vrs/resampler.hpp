#pragma once

#include <cstddef>
#include <vector>

#include "vrs/model.hpp"
#include "vrs/numerics.hpp"

namespace vrs {

inline constexpr std::size_t kDefaultMaxAttempts = 10000;

// l = -log p(x,z) + log q(z|x) - T. T = +inf gives -inf regardless of the
// log-densities (no rejection).
inline double log_ratio_from(double log_p, double log_q, double threshold) {
    if (threshold == kInf) return -kInf;
    return -log_p + log_q - threshold;
}

// log a = -softplus(l); a is in (0, 1], equal to 1 exactly when l = -inf.
inline double log_accept_from_ratio(double l) { return -softplus(l); }

// One accepted proposal with the densities computed while testing it.
struct Draw {
    Latent z;
    std::size_t attempts = 0;  // proposals consumed, including this one
    double log_p = 0.0;
    double log_q = 0.0;
};

struct SampleBatch {
    std::vector<Latent> accepted;
    std::size_t attempts = 0;

    double acceptance_rate() const {
        return attempts == 0 ? 0.0 : static_cast<double>(accepted.size()) / static_cast<double>(attempts);
    }
};

// Proposal q filtered by the soft accept/reject test against model p at
// threshold T: density proportional to q(z|x) a(z|x,T).
//
// Holds references; the proposal and model must outlive it.
class ResampledProposal {
public:
    ResampledProposal(const Proposal& proposal, const LatentModel& model, double threshold,
                      std::size_t max_attempts = kDefaultMaxAttempts);

    const Proposal& proposal() const noexcept { return *proposal_; }
    const LatentModel& model() const noexcept { return *model_; }
    double threshold() const noexcept { return threshold_; }
    std::size_t max_attempts() const noexcept { return max_attempts_; }
    bool rejection_disabled() const noexcept { return threshold_ == kInf; }

    double log_ratio(ObsView x, LatentView z) const;
    double log_accept_prob(ObsView x, LatentView z) const;
    double log_unnorm_density(ObsView x, LatentView z) const;

    // Draws proposals until one passes u < a(z). Throws BudgetExhausted once
    // max_attempts proposals were rejected.
    Draw sample(ObsView x, Rng& rng) const;

    SampleBatch sample_batch(ObsView x, Rng& rng, std::size_t count) const;

    // log of the mean acceptance probability over n fresh proposals.
    double estimate_log_ZR(ObsView x, Rng& rng, std::size_t n) const;

private:
    const Proposal* proposal_;
    const LatentModel* model_;
    double threshold_;
    std::size_t max_attempts_;
};

}  // namespace vrs
