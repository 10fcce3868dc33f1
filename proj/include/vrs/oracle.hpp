#pragma once

// Exact ground truth by brute-force enumeration of small latent spaces.
// Every quantity is computed in log space with states visited in a fixed
// lexicographic order.

#include <cstddef>
#include <functional>
#include <vector>

#include "vrs/model.hpp"
#include "vrs/param_vector.hpp"
#include "vrs/resampler.hpp"

namespace vrs::oracle {

class EnumerableSpace {
public:
    static constexpr std::size_t kMaxStates = std::size_t{1} << 20;

    // All binary vectors of the given length, lexicographic (first bit slowest).
    static EnumerableSpace binary(std::size_t bits);
    // Single-index latents {0}, ..., {k-1}: grid cells or categorical outcomes.
    static EnumerableSpace categorical(std::size_t k);
    // Counts {0}, ..., {max_inclusive}.
    static EnumerableSpace integers(int max_inclusive);

    const std::vector<Latent>& states() const noexcept { return states_; }
    std::size_t size() const noexcept { return states_.size(); }

private:
    explicit EnumerableSpace(std::vector<Latent> states) : states_(std::move(states)) {}
    std::vector<Latent> states_;
};

// Per-state log-densities of one (q, p, x, T) configuration.
struct Enumeration {
    double threshold = 0.0;
    std::vector<double> log_p;
    std::vector<double> log_q;
    std::vector<double> log_gamma_r;  // log q + log a
    double log_ZR = 0.0;
    double log_ZP = 0.0;              // log p(x)

    double r(std::size_t i) const;            // normalized resampled density
    double posterior(std::size_t i) const;    // normalized p(z | x)
};

Enumeration enumerate(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);

double exact_log_ZR(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);
double exact_ZR(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);
double exact_log_evidence(const LatentModel& model, ObsView x, const EnumerableSpace& space);

// Normalized R over the space, in state order.
std::vector<double> exact_R(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);
std::vector<double> exact_posterior(const LatentModel& model, ObsView x, const EnumerableSpace& space);

double exact_kl_R_P(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);
double exact_kl_Q_P(const Proposal& q, const LatentModel& model, ObsView x, const EnumerableSpace& space);

// E_R[log p - log gamma_r] + log Z_R.
double exact_relbo(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);
// E_Q[log p - log q].
double exact_elbo(const Proposal& q, const LatentModel& model, ObsView x, const EnumerableSpace& space);

// log E_R[exp(A - E_R[A])] with A = log p - log gamma_r; equals KL(R || P).
double exact_kl_from_centered_signal(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);

// COV_R(log sigmoid(l) + T, sigmoid(l)): the derivative of KL(R || P) in T.
double exact_kl_slope_in_threshold(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);

struct ExactGradient {
    ParamVector d_theta;
    ParamVector d_phi;
};

// The covariance-form R-ELBO gradients with expectations taken exactly under R.
ExactGradient exact_relbo_grad(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space);

// Exact gamma-quantile (lower inverse CDF) of log q - log p under z ~ Q.
double exact_log_ratio_quantile(const Proposal& q, const LatentModel& model, ObsView x,
                                const EnumerableSpace& space, double gamma);

// P_Q[l < 0] and P_Q[l <= 0] at threshold T.
struct RatioMass {
    double below = 0.0;
    double at_or_below = 0.0;
};
RatioMass exact_ratio_mass(const Proposal& q, const LatentModel& model, ObsView x, const EnumerableSpace& space,
                           double threshold);

// Central differences, one coordinate at a time.
ParamVector fd_grad(const std::function<double(const ParamVector&)>& fn, const ParamVector& params, double step);

}  // namespace vrs::oracle
