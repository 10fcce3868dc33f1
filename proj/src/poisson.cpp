#include "vrs/poisson.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vrs/errors.hpp"
#include "vrs/numerics.hpp"

namespace vrs {

namespace {

int single_count(ObsView x, LatentView z, const char* what) {
    if (!x.empty()) throw ShapeError(std::string(what) + ": observation must be empty");
    if (z.size() != 1) throw ShapeError(std::string(what) + ": latent must be a single count");
    if (z[0] < 0) throw DomainError(std::string(what) + ": negative count");
    return z[0];
}

}  // namespace

double poisson_log_pmf(int k, double rate) {
    return static_cast<double>(k) * std::log(rate) - rate - std::lgamma(static_cast<double>(k) + 1.0);
}

TruncatedPoissonTarget::TruncatedPoissonTarget(double rate, int cutoff, double floor_mass, int support_cap)
    : rate_(rate), cutoff_(cutoff), floor_mass_(floor_mass), support_cap_(support_cap) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("TruncatedPoissonTarget: rate must be positive");
    if (cutoff < 0) throw DomainError("TruncatedPoissonTarget: cutoff must be non-negative");
    if (!(floor_mass >= 0.0)) throw DomainError("TruncatedPoissonTarget: floor mass must be non-negative");
    if (support_cap < cutoff) throw DomainError("TruncatedPoissonTarget: support cap below cutoff");
}

double TruncatedPoissonTarget::log_joint(ObsView x, LatentView z) const {
    const int k = single_count(x, z, "TruncatedPoissonTarget");
    if (k < cutoff_) return floor_mass_ > 0.0 ? std::log(floor_mass_) : -kInf;
    return poisson_log_pmf(k, rate_);
}

void TruncatedPoissonTarget::accumulate_grad_log_joint(ObsView x, LatentView z, double, ParamVector& out) const {
    single_count(x, z, "TruncatedPoissonTarget");
    params_.require_same_layout(out, "TruncatedPoissonTarget gradient");
}

void TruncatedPoissonTarget::set_params(const ParamVector& params) {
    params_.require_same_layout(params, "TruncatedPoissonTarget::set_params");
}

PoissonProposal::PoissonProposal(double phi)
    : params_(ParamLayout::Builder().add("phi", 1).build(), std::vector<double>{phi}) {
    if (!std::isfinite(phi)) throw NumericError("PoissonProposal: phi must be finite");
}

double PoissonProposal::rate() const { return std::exp(params_[0]); }

Latent PoissonProposal::sample(ObsView x, Rng& rng) const {
    if (!x.empty()) throw ShapeError("PoissonProposal: observation must be empty");
    return Latent{std::poisson_distribution<int>(rate())(rng)};
}

double PoissonProposal::log_prob(ObsView x, LatentView z) const {
    const int k = single_count(x, z, "PoissonProposal");
    return static_cast<double>(k) * params_[0] - rate() - std::lgamma(static_cast<double>(k) + 1.0);
}

void PoissonProposal::accumulate_grad_log_prob(ObsView x, LatentView z, double scale, ParamVector& out) const {
    const int k = single_count(x, z, "PoissonProposal");
    params_.require_same_layout(out, "PoissonProposal gradient");
    out[0] += scale * (static_cast<double>(k) - rate());
}

void PoissonProposal::set_params(const ParamVector& params) {
    params_.require_same_layout(params, "PoissonProposal::set_params");
    if (!std::isfinite(params[0])) throw NumericError("PoissonProposal: phi must be finite");
    params_ = ParamVector(params_.layout(), std::vector<double>{params[0]});
}

}  // namespace vrs
