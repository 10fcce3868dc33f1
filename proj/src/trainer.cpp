#include "vrs/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "vrs/errors.hpp"
#include "vrs/numerics.hpp"
#include "vrs/parallel.hpp"

namespace vrs {

namespace {

// Stream tags for derive_stream.
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kRefreshStream = 2;
constexpr std::uint64_t kGradStream = 3;

// Datapoints per partial sum. Fixed so the reduction order does not depend on
// the thread count.
constexpr std::size_t kChunk = 8;

void require(bool ok, const char* field, const std::string& why) {
    if (!ok) throw ConfigError(std::string(field) + ": " + why);
}

struct Partial {
    ParamVector d_theta;
    ParamVector d_phi;
    EstimateStats stats;
};

}  // namespace

void TrainConfig::validate() const {
    require(gamma > 0.0 && gamma <= 1.0, "gamma", "must lie in (0, 1]");
    require(quantile_samples >= 1, "N", "must be at least 1");
    require(covariance_samples >= 2, "S", "must be at least 2");
    require(epochs >= 1, "epochs", "must be at least 1");
    require(batch_size >= 1, "batch_size", "must be at least 1");
    require(max_attempts >= 1, "max_attempts", "must be at least 1");
    require(threads >= 1, "threads", "must be at least 1");
    require(optimizer.learning_rate > 0.0, "lr", "must be positive");
    require(optimizer.momentum >= 0.0 && optimizer.momentum < 1.0, "momentum", "must lie in [0, 1)");
    if (fixed_threshold) {
        require(!std::isnan(*fixed_threshold) && *fixed_threshold != -kInf, "T", "must be finite or +inf");
    }
}

void TrainMetrics::write_csv_header(std::ostream& out) const { out << kCsvHeader << '\n'; }

void TrainMetrics::write_csv_row(std::ostream& out, const StepRecord& r) {
    std::ostringstream os;
    os.precision(10);
    os << 1 << ',' << r.epoch << ',' << r.step << ',' << r.signal_mean << ',' << r.accept_rate << ',' << r.attempts
       << ',' << r.grad_norm_theta << ',' << r.grad_norm_phi << ',' << r.wall_ms << '\n';
    out << os.str();
}

void TrainMetrics::write_csv(std::ostream& out) const {
    write_csv_header(out);
    for (const auto& r : records_) write_csv_row(out, r);
}

EstimateStats sampled_relbo_gradient(const ResampledProposal& rp, ObsView x, Rng& rng, std::size_t S, double scale,
                                     ParamVector& d_theta, ParamVector& d_phi) {
    std::vector<Draw> draws;
    draws.reserve(S);
    for (std::size_t i = 0; i < S; ++i) draws.push_back(rp.sample(x, rng));
    return accumulate_relbo_grad(rp, x, draws, scale, d_theta, d_phi);
}

TrainResult train(LatentModel& model, Proposal& proposal, std::span<const Observation> dataset,
                  const TrainConfig& config, const TrainHooks& hooks, const ResumeState* resume) {
    config.validate();
    if (dataset.empty()) throw ConfigError("dataset: must not be empty");

    const std::size_t n = dataset.size();
    const std::size_t B = std::min(config.batch_size, n);
    const std::size_t steps_per_epoch = (n + B - 1) / B;
    const std::size_t refresh_period = config.refresh_steps == 0 ? steps_per_epoch : config.refresh_steps;
    const GradientAccumulator& accumulate = hooks.gradient ? hooks.gradient : GradientAccumulator(sampled_relbo_gradient);

    ThresholdTable table(n, config.gamma, refresh_period, config.quantile_samples);
    Optimizer theta_opt(config.optimizer, model.params().layout());
    Optimizer phi_opt(config.optimizer, proposal.params().layout());
    std::size_t start_epoch = 0;
    std::size_t step = 0;
    if (resume != nullptr) {
        start_epoch = resume->epoch;
        step = resume->step;
        if (!resume->thresholds.empty()) table = table.with_values(resume->thresholds);
        theta_opt.restore(resume->theta_steps, resume->theta_first, resume->theta_second);
        phi_opt.restore(resume->phi_steps, resume->phi_first, resume->phi_second);
    }

    TrainMetrics metrics;
    ParamVector theta = model.params();
    ParamVector phi = proposal.params();
    const auto t0 = std::chrono::steady_clock::now();

    for (std::size_t epoch = start_epoch; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng = derive_stream(config.seed, {kShuffleStream, epoch});
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        for (std::size_t b = 0; b < steps_per_epoch; ++b) {
            if (!config.fixed_threshold && step % refresh_period == 0) {
                Rng refresh_rng = derive_stream(config.seed, {kRefreshStream, step});
                table = refresh_table(table, proposal, model, dataset, refresh_rng, config.threads);
            }

            const std::size_t begin = b * B;
            const std::size_t end = std::min(n, begin + B);
            const double scale = 1.0 / static_cast<double>(end - begin);
            const std::size_t chunks = (end - begin + kChunk - 1) / kChunk;
            std::vector<Partial> partial(chunks);

            parallel_for(chunks, config.threads, [&](std::size_t c) {
                Partial& part = partial[c];
                part.d_theta = ParamVector(model.params().layout());
                part.d_phi = ParamVector(proposal.params().layout());
                const std::size_t cb = begin + c * kChunk;
                const std::size_t ce = std::min(end, cb + kChunk);
                for (std::size_t k = cb; k < ce; ++k) {
                    const std::size_t idx = order[k];
                    const double T = config.fixed_threshold ? *config.fixed_threshold : table.at(idx);
                    ResampledProposal rp(proposal, model, T, config.max_attempts);
                    Rng rng = derive_stream(config.seed, {kGradStream, epoch, idx});
                    EstimateStats s;
                    try {
                        s = accumulate(rp, dataset[idx], rng, config.covariance_samples, scale, part.d_theta,
                                       part.d_phi);
                    } catch (const BudgetExhausted& e) {
                        throw BudgetExhausted(e.attempts(), "epoch " + std::to_string(epoch) + ", datapoint " +
                                                                std::to_string(idx) + ", threshold " +
                                                                std::to_string(T));
                    }
                    part.stats.sample_count += s.sample_count;
                    part.stats.attempts += s.attempts;
                    part.stats.signal_sum += s.signal_sum;
                }
            });

            ParamVector d_theta(model.params().layout());
            ParamVector d_phi(proposal.params().layout());
            EstimateStats total;
            for (const auto& part : partial) {
                d_theta += part.d_theta;
                d_phi += part.d_phi;
                total.sample_count += part.stats.sample_count;
                total.attempts += part.stats.attempts;
                total.signal_sum += part.stats.signal_sum;
            }

            StepRecord rec;
            rec.epoch = epoch;
            rec.step = step;
            rec.signal_mean = total.sample_count ? total.signal_sum / static_cast<double>(total.sample_count) : 0.0;
            rec.accept_rate =
                total.attempts ? static_cast<double>(total.sample_count) / static_cast<double>(total.attempts) : 0.0;
            rec.attempts = total.attempts;
            rec.grad_norm_theta = d_theta.norm();
            rec.grad_norm_phi = d_phi.norm();
            rec.wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

            if (!d_theta.all_finite() || !d_phi.all_finite() || !std::isfinite(rec.signal_mean)) {
                std::ostringstream os;
                os << "non-finite gradient at epoch " << epoch << ", step " << step << " (|d_theta|="
                   << rec.grad_norm_theta << ", |d_phi|=" << rec.grad_norm_phi << ", signal_mean=" << rec.signal_mean
                   << ", attempts=" << rec.attempts << ")";
                throw NumericError(os.str());
            }

            metrics.append(rec);
            theta_opt.step(theta, d_theta);
            phi_opt.step(phi, d_phi);
            model.set_params(theta);
            proposal.set_params(phi);
            ++step;
            if (hooks.on_step) hooks.on_step(rec);
        }

        if (hooks.on_epoch_end) {
            hooks.on_epoch_end(TrainSnapshot{epoch + 1, step, model, proposal, table, theta_opt, phi_opt});
        }
    }

    return TrainResult{model.params(), proposal.params(), table, std::move(metrics)};
}

double eval_is_bound(const LatentModel& model, const Proposal& proposal, ObsView x, std::size_t k, Rng& rng) {
    if (k == 0) throw PreconditionError("eval_is_bound: k must be at least 1");
    std::vector<double> log_w(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Latent z = proposal.sample(x, rng);
        log_w[i] = model.log_joint(x, z) - proposal.log_prob(x, z);
    }
    return k == 1 ? log_w[0] : log_mean_exp(log_w);
}

double eval_rs_bound(const ResampledProposal& rp, ObsView x, std::size_t k_accepted, std::size_t n_Z, Rng& rng) {
    if (k_accepted == 0 || n_Z == 0) throw PreconditionError("eval_rs_bound: sample counts must be at least 1");
    double sum = 0.0;
    for (std::size_t i = 0; i < k_accepted; ++i) {
        const Draw d = rp.sample(x, rng);
        sum += learning_signal(d.log_p, d.log_q, rp.threshold());
    }
    return sum / static_cast<double>(k_accepted) + rp.estimate_log_ZR(x, rng, n_Z);
}

}  // namespace vrs
