#include "vrs/bernoulli_layer.hpp"

#include "vrs/errors.hpp"
#include "vrs/numerics.hpp"
#include "vrs/simd.hpp"

namespace vrs {

BernoulliLayer::BernoulliLayer(std::span<const double> weights, std::span<const double> bias, std::size_t in_dim)
    : weights_(weights), bias_(bias), in_dim_(in_dim) {
    if (weights_.size() != in_dim_ * bias_.size()) throw ShapeError("BernoulliLayer: weight matrix size mismatch");
}

void BernoulliLayer::logits(std::span<const double> input, std::span<double> out) const {
    simd::gemv(weights_, out_dim(), in_dim_, input, bias_, out);
}

double BernoulliLayer::log_prob_from_logits(std::span<const double> logits, std::span<const int> output) {
    if (logits.size() != output.size()) throw ShapeError("BernoulliLayer: output length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) s += bernoulli_log_prob(logits[i], output[i]);
    return s;
}

double BernoulliLayer::log_prob(std::span<const double> input, std::span<const int> output) const {
    std::vector<double> l(out_dim());
    logits(input, l);
    return log_prob_from_logits(l, output);
}

void BernoulliLayer::sample(std::span<const double> input, Rng& rng, std::span<int> out) const {
    std::vector<double> l(out_dim());
    logits(input, l);
    for (std::size_t i = 0; i < l.size(); ++i) out[i] = uniform01(rng) < sigmoid(l[i]) ? 1 : 0;
}

void BernoulliLayer::accumulate_grad(std::span<const double> input, std::span<const int> output, double scale,
                                     std::span<double> grad_weights, std::span<double> grad_bias) const {
    if (output.size() != out_dim()) throw ShapeError("BernoulliLayer: output length mismatch");
    std::vector<double> delta(out_dim());
    logits(input, delta);
    for (std::size_t i = 0; i < delta.size(); ++i) {
        delta[i] = static_cast<double>(output[i]) - sigmoid(delta[i]);
        grad_bias[i] += scale * delta[i];
    }
    if (in_dim_ > 0) simd::rank1_update(scale, delta, input, grad_weights);
}

std::vector<double> to_real(std::span<const int> bits) {
    std::vector<double> out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out[i] = static_cast<double>(bits[i]);
    return out;
}

}  // namespace vrs
