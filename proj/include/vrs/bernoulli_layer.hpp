#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vrs/rng.hpp"

namespace vrs {

// Non-owning view of one stochastic layer: every output unit is an independent
// Bernoulli with mean sigmoid(W input + b). A layer with in_dim == 0 is a
// bias-only prior.
class BernoulliLayer {
public:
    BernoulliLayer(std::span<const double> weights, std::span<const double> bias, std::size_t in_dim);

    std::size_t in_dim() const noexcept { return in_dim_; }
    std::size_t out_dim() const noexcept { return bias_.size(); }

    void logits(std::span<const double> input, std::span<double> out) const;

    // log prob of a binary output vector given the layer input.
    double log_prob(std::span<const double> input, std::span<const int> output) const;
    static double log_prob_from_logits(std::span<const double> logits, std::span<const int> output);

    void sample(std::span<const double> input, Rng& rng, std::span<int> out) const;

    // grad_weights += scale * (output - sigmoid(logits)) input^T, grad_bias likewise.
    void accumulate_grad(std::span<const double> input, std::span<const int> output, double scale,
                         std::span<double> grad_weights, std::span<double> grad_bias) const;

private:
    std::span<const double> weights_;
    std::span<const double> bias_;
    std::size_t in_dim_;
};

// Binary vector as doubles, for feeding the dense kernels.
std::vector<double> to_real(std::span<const int> bits);

}  // namespace vrs
