#pragma once

#include <cstddef>
#include <vector>

#include "vrs/bernoulli_layer.hpp"
#include "vrs/model.hpp"

namespace vrs {

// Layer widths of a sigmoid belief network. hidden[0] is the layer adjacent to
// the observation; hidden.back() is the top layer. Latent vectors are the
// concatenation hidden[0] | hidden[1] | ... .
struct SbnShape {
    std::size_t visible = 0;
    std::vector<std::size_t> hidden;

    std::size_t latent_dim() const;
    bool operator==(const SbnShape&) const = default;
};

// Generative network: bias-only prior on the top layer, then
// top -> ... -> hidden[0] -> x, each a Bernoulli layer.
// Segments: "prior.bias", then per layer k (counted from the top, 1-based)
// "gen{k}.weights" / "gen{k}.bias".
class SbnGenerative final : public LatentModel {
public:
    explicit SbnGenerative(SbnShape shape);

    const SbnShape& shape() const noexcept { return shape_; }

    double log_joint(ObsView x, LatentView z) const override;
    void accumulate_grad_log_joint(ObsView x, LatentView z, double scale, ParamVector& out) const override;

    const ParamVector& params() const override { return params_; }
    void set_params(const ParamVector& params) override;

    // Weights ~ U(-scale, scale), biases 0.
    void randomize(Rng& rng, double scale = 0.05);

    // Ancestral sample (x, z).
    std::pair<Observation, Latent> sample_joint(Rng& rng) const;

private:
    struct Edge {
        BernoulliLayer layer;
        std::size_t parent_offset;  // into z
        std::size_t child_offset;   // into z, or npos for x
    };
    std::vector<Edge> edges() const;

    SbnShape shape_;
    ParamVector params_;
};

// Recognition network, same widths in the reverse direction:
// x -> hidden[0] -> hidden[1] -> ... . Segments "rec{k}.weights" /
// "rec{k}.bias", k = 1 for the layer fed by x.
class SbnRecognition final : public Proposal {
public:
    explicit SbnRecognition(SbnShape shape);

    const SbnShape& shape() const noexcept { return shape_; }

    Latent sample(ObsView x, Rng& rng) const override;
    double log_prob(ObsView x, LatentView z) const override;
    void accumulate_grad_log_prob(ObsView x, LatentView z, double scale, ParamVector& out) const override;

    const ParamVector& params() const override { return params_; }
    void set_params(const ParamVector& params) override;

    void randomize(Rng& rng, double scale = 0.05);

private:
    BernoulliLayer layer(std::size_t k) const;

    SbnShape shape_;
    ParamVector params_;
};

}  // namespace vrs
