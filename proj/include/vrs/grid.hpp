#pragma once

#include <cstddef>
#include <vector>

#include "vrs/model.hpp"

namespace vrs {

// Unnormalized target over an n x n grid. Latent z = {row * n + col}; the
// observation must be empty. Parameters are the log-weights themselves.
class GridTarget final : public LatentModel {
public:
    GridTarget(std::size_t n, std::vector<double> log_weights);

    std::size_t side() const noexcept { return n_; }
    std::size_t cells() const noexcept { return n_ * n_; }

    double log_joint(ObsView x, LatentView z) const override;
    void accumulate_grad_log_joint(ObsView x, LatentView z, double scale, ParamVector& out) const override;

    const ParamVector& params() const override { return params_; }
    void set_params(const ParamVector& params) override;

private:
    std::size_t cell(ObsView x, LatentView z) const;

    std::size_t n_;
    ParamVector params_;
};

// Softmax-parameterized categorical proposal over k outcomes (logits are phi).
class CategoricalProposal final : public Proposal {
public:
    explicit CategoricalProposal(std::size_t k);  // uniform
    explicit CategoricalProposal(std::vector<double> logits);

    std::size_t outcomes() const noexcept { return probs_.size(); }

    Latent sample(ObsView x, Rng& rng) const override;
    double log_prob(ObsView x, LatentView z) const override;
    void accumulate_grad_log_prob(ObsView x, LatentView z, double scale, ParamVector& out) const override;

    const ParamVector& params() const override { return params_; }
    void set_params(const ParamVector& params) override;

private:
    std::size_t index(LatentView z) const;
    void refresh();

    ParamVector params_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
    double log_norm_ = 0.0;
};

// The built-in 5 x 5 two-mode target used by the grid experiments.
GridTarget make_grid_fixture();

}  // namespace vrs
