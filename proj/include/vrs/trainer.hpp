#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vrs/grad.hpp"
#include "vrs/model.hpp"
#include "vrs/optimizer.hpp"
#include "vrs/threshold.hpp"

namespace vrs {

struct TrainConfig {
    double gamma = 0.9;                  // threshold quantile
    std::size_t refresh_steps = 0;       // optimizer steps between refreshes; 0 = once per epoch
    std::size_t quantile_samples = 100;  // N
    std::size_t covariance_samples = 5;  // S >= 2
    std::size_t epochs = 1;
    std::size_t batch_size = 50;
    OptimizerSpec optimizer;
    std::uint64_t seed = 0;
    std::size_t max_attempts = kDefaultMaxAttempts;
    std::optional<double> fixed_threshold;  // bypasses the threshold table
    std::size_t threads = 1;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

struct StepRecord {
    std::size_t epoch = 0;
    std::size_t step = 0;
    double signal_mean = 0.0;
    double accept_rate = 0.0;
    std::size_t attempts = 0;
    double grad_norm_theta = 0.0;
    double grad_norm_phi = 0.0;
    double wall_ms = 0.0;
};

class TrainMetrics {
public:
    static constexpr const char* kCsvHeader =
        "schema_version,epoch,step,signal_mean,accept_rate,attempts,grad_norm_theta,grad_norm_phi,wall_ms";

    void append(const StepRecord& r) { records_.push_back(r); }
    const std::vector<StepRecord>& records() const noexcept { return records_; }

    void write_csv_header(std::ostream& out) const;
    static void write_csv_row(std::ostream& out, const StepRecord& r);
    void write_csv(std::ostream& out) const;

private:
    std::vector<StepRecord> records_;
};

// Adds scale * (gradient estimate for one datapoint) into d_theta / d_phi.
using GradientAccumulator = std::function<EstimateStats(const ResampledProposal& rp, ObsView x, Rng& rng,
                                                        std::size_t S, double scale, ParamVector& d_theta,
                                                        ParamVector& d_phi)>;

// Default accumulator: S draws from R, then the leave-one-out covariance estimator.
EstimateStats sampled_relbo_gradient(const ResampledProposal& rp, ObsView x, Rng& rng, std::size_t S, double scale,
                                     ParamVector& d_theta, ParamVector& d_phi);

struct TrainSnapshot {
    std::size_t epoch;  // epochs completed
    std::size_t step;   // optimizer steps completed
    const LatentModel& model;
    const Proposal& proposal;
    const ThresholdTable& thresholds;
    const Optimizer& theta_optimizer;
    const Optimizer& phi_optimizer;
};

struct TrainHooks {
    GradientAccumulator gradient;  // empty = sampled_relbo_gradient
    std::function<void(const StepRecord&)> on_step;  // after the update is applied
    std::function<void(const TrainSnapshot&)> on_epoch_end;
};

// Where to pick up an interrupted run (epoch boundary).
struct ResumeState {
    std::size_t epoch = 0;
    std::size_t step = 0;
    std::vector<double> thresholds;
    std::size_t theta_steps = 0;
    ParamVector theta_first, theta_second;
    std::size_t phi_steps = 0;
    ParamVector phi_first, phi_second;
};

struct TrainResult {
    ParamVector theta;
    ParamVector phi;
    ThresholdTable thresholds;
    TrainMetrics metrics;
};

// Variational rejection sampling training loop. Thresholds start at +inf and
// are re-estimated every refresh period; each step averages per-datapoint
// R-ELBO gradient estimates over a minibatch and takes an ascent step on
// both parameter sets. Deterministic given config.seed.
//
// model and proposal are updated in place.
TrainResult train(LatentModel& model, Proposal& proposal, std::span<const Observation> dataset,
                  const TrainConfig& config, const TrainHooks& hooks = {}, const ResumeState* resume = nullptr);

// Importance-sampled bound: log (1/k) sum_i p(x, z_i) / q(z_i | x), z_i ~ Q.
double eval_is_bound(const LatentModel& model, const Proposal& proposal, ObsView x, std::size_t k, Rng& rng);

// Resampled bound: mean over k accepted z ~ R of (log p - log q + softplus(l)),
// plus log Z_R estimated from n_Z proposals.
double eval_rs_bound(const ResampledProposal& rp, ObsView x, std::size_t k_accepted, std::size_t n_Z, Rng& rng);

}  // namespace vrs
