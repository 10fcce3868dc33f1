#include "vrs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vrs/errors.hpp"
#include "vrs/numerics.hpp"

namespace vrs {

GridTarget::GridTarget(std::size_t n, std::vector<double> log_weights) : n_(n) {
    if (n == 0 || log_weights.size() != n * n) throw ShapeError("GridTarget: need n*n log-weights");
    if (std::none_of(log_weights.begin(), log_weights.end(), [](double v) { return std::isfinite(v); })) {
        throw DomainError("GridTarget: at least one log-weight must be finite");
    }
    for (double v : log_weights) {
        if (std::isnan(v) || v == kInf) throw DomainError("GridTarget: log-weights must be < +inf and not NaN");
    }
    params_ = ParamVector(ParamLayout::Builder().add("log_weights", n, n).build(), std::move(log_weights));
}

std::size_t GridTarget::cell(ObsView x, LatentView z) const {
    if (!x.empty()) throw ShapeError("GridTarget: observation must be empty");
    if (z.size() != 1) throw ShapeError("GridTarget: latent must be a single cell index");
    if (z[0] < 0 || static_cast<std::size_t>(z[0]) >= cells()) {
        throw DomainError("GridTarget: cell index " + std::to_string(z[0]) + " out of range");
    }
    return static_cast<std::size_t>(z[0]);
}

double GridTarget::log_joint(ObsView x, LatentView z) const { return params_[cell(x, z)]; }

void GridTarget::accumulate_grad_log_joint(ObsView x, LatentView z, double scale, ParamVector& out) const {
    params_.require_same_layout(out, "GridTarget gradient");
    out[cell(x, z)] += scale;
}

void GridTarget::set_params(const ParamVector& params) {
    params_.require_same_layout(params, "GridTarget::set_params");
    params_ = ParamVector(params_.layout(), std::vector<double>(params.values().begin(), params.values().end()));
}

CategoricalProposal::CategoricalProposal(std::size_t k) : CategoricalProposal(std::vector<double>(k, 0.0)) {}

CategoricalProposal::CategoricalProposal(std::vector<double> logits) {
    if (logits.empty()) throw ShapeError("CategoricalProposal: need at least one outcome");
    const std::size_t k = logits.size();
    params_ = ParamVector(ParamLayout::Builder().add("logits", k).build(), std::move(logits));
    refresh();
}

void CategoricalProposal::refresh() {
    const auto v = params_.values();
    for (double l : v) {
        if (!std::isfinite(l)) throw NumericError("CategoricalProposal: non-finite logit");
    }
    log_norm_ = log_sum_exp(v);
    probs_.resize(v.size());
    cumulative_.resize(v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        probs_[i] = std::exp(v[i] - log_norm_);
        acc += probs_[i];
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
}

std::size_t CategoricalProposal::index(LatentView z) const {
    if (z.size() != 1) throw ShapeError("CategoricalProposal: latent must be a single index");
    if (z[0] < 0 || static_cast<std::size_t>(z[0]) >= probs_.size()) {
        throw DomainError("CategoricalProposal: index " + std::to_string(z[0]) + " out of range");
    }
    return static_cast<std::size_t>(z[0]);
}

Latent CategoricalProposal::sample(ObsView, Rng& rng) const {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), probs_.size() - 1);
    return Latent{static_cast<int>(i)};
}

double CategoricalProposal::log_prob(ObsView, LatentView z) const { return params_[index(z)] - log_norm_; }

void CategoricalProposal::accumulate_grad_log_prob(ObsView, LatentView z, double scale, ParamVector& out) const {
    params_.require_same_layout(out, "CategoricalProposal gradient");
    const std::size_t i = index(z);
    for (std::size_t j = 0; j < probs_.size(); ++j) out[j] -= scale * probs_[j];
    out[i] += scale;
}

void CategoricalProposal::set_params(const ParamVector& params) {
    params_.require_same_layout(params, "CategoricalProposal::set_params");
    params_ = ParamVector(params_.layout(), std::vector<double>(params.values().begin(), params.values().end()));
    refresh();
}

GridTarget make_grid_fixture() {
    // Two bumps of different height and width plus a small floor; log-masses
    // fall roughly in [-15, -6] so thresholds in [-5, 10] all bite.
    constexpr std::size_t n = 5;
    std::vector<double> lw(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double dr1 = static_cast<double>(r) - 1.0;
            const double dc1 = static_cast<double>(c) - 1.0;
            const double dr2 = static_cast<double>(r) - 3.5;
            const double dc2 = static_cast<double>(c) - 3.0;
            const double w = std::exp(-(dr1 * dr1 + dc1 * dc1)) + 0.6 * std::exp(-(dr2 * dr2 + dc2 * dc2) / 1.5) + 1e-4;
            lw[r * n + c] = std::log(w) - 6.0;
        }
    }
    return GridTarget(n, std::move(lw));
}

}  // namespace vrs
