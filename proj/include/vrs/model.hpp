#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrs/param_vector.hpp"
#include "vrs/rng.hpp"

namespace vrs {

// Observed data: a binary vector (empty for non-amortized targets).
using Observation = std::vector<std::uint8_t>;
// Latent state: a binary vector, a single integer, or a single cell index.
using Latent = std::vector<int>;

using ObsView = std::span<const std::uint8_t>;
using LatentView = std::span<const int>;

// Generative side: log p_theta(x, z) and its parameter gradient. The density may
// be unnormalized in z.
class LatentModel {
public:
    virtual ~LatentModel() = default;

    virtual double log_joint(ObsView x, LatentView z) const = 0;

    // out += scale * grad_theta log p(x, z)
    virtual void accumulate_grad_log_joint(ObsView x, LatentView z, double scale, ParamVector& out) const = 0;

    virtual const ParamVector& params() const = 0;
    virtual void set_params(const ParamVector& params) = 0;

    ParamVector grad_log_joint(ObsView x, LatentView z) const {
        ParamVector g(params().layout());
        accumulate_grad_log_joint(x, z, 1.0, g);
        return g;
    }
};

// Recognition side: sampling, log q_phi(z | x) and its parameter gradient.
class Proposal {
public:
    virtual ~Proposal() = default;

    virtual Latent sample(ObsView x, Rng& rng) const = 0;
    virtual double log_prob(ObsView x, LatentView z) const = 0;

    // out += scale * grad_phi log q(z | x)
    virtual void accumulate_grad_log_prob(ObsView x, LatentView z, double scale, ParamVector& out) const = 0;

    virtual const ParamVector& params() const = 0;
    virtual void set_params(const ParamVector& params) = 0;

    ParamVector grad_log_prob(ObsView x, LatentView z) const {
        ParamVector g(params().layout());
        accumulate_grad_log_prob(x, z, 1.0, g);
        return g;
    }
};

}  // namespace vrs
