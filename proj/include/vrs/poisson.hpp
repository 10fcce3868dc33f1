#pragma once

#include <cstddef>

#include "vrs/model.hpp"

namespace vrs {

// Poisson(rate) with the mass on 0 <= z < cutoff replaced by floor_mass.
// Unnormalized; has no trainable parameters. support_cap bounds exact enumeration.
class TruncatedPoissonTarget final : public LatentModel {
public:
    TruncatedPoissonTarget(double rate, int cutoff, double floor_mass = 1e-30, int support_cap = 200);

    double rate() const noexcept { return rate_; }
    int cutoff() const noexcept { return cutoff_; }
    double floor_mass() const noexcept { return floor_mass_; }
    int support_cap() const noexcept { return support_cap_; }

    double log_joint(ObsView x, LatentView z) const override;
    void accumulate_grad_log_joint(ObsView x, LatentView z, double scale, ParamVector& out) const override;

    const ParamVector& params() const override { return params_; }
    void set_params(const ParamVector& params) override;

private:
    double rate_;
    int cutoff_;
    double floor_mass_;
    int support_cap_;
    ParamVector params_;
};

// Q_phi = Poisson(e^phi), phi unconstrained.
class PoissonProposal final : public Proposal {
public:
    explicit PoissonProposal(double phi);

    double phi() const { return params_[0]; }
    double rate() const;

    Latent sample(ObsView x, Rng& rng) const override;
    double log_prob(ObsView x, LatentView z) const override;
    void accumulate_grad_log_prob(ObsView x, LatentView z, double scale, ParamVector& out) const override;

    const ParamVector& params() const override { return params_; }
    void set_params(const ParamVector& params) override;

private:
    ParamVector params_;
};

double poisson_log_pmf(int k, double rate);

}  // namespace vrs
