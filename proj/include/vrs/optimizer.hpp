#pragma once

#include <cstddef>
#include <string>

#include "vrs/param_vector.hpp"

namespace vrs {

enum class OptimizerKind { sgd_momentum, adam };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

struct OptimizerSpec {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 3e-4;
    double momentum = 0.5;  // sgd_momentum
    double beta1 = 0.9;     // adam
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Gradient ASCENT on a flat parameter vector.
//   sgd_momentum:  v <- mu v + g;                 p <- p + lr v
//   adam:          m <- b1 m + (1-b1) g;  s <- b2 s + (1-b2) g^2
//                  p <- p + lr mhat / (sqrt(shat) + eps), bias-corrected
class Optimizer {
public:
    Optimizer(OptimizerSpec spec, LayoutPtr layout);

    void step(ParamVector& params, const ParamVector& grad);

    const OptimizerSpec& spec() const noexcept { return spec_; }
    std::size_t step_count() const noexcept { return steps_; }
    const ParamVector& first_moment() const noexcept { return first_; }
    const ParamVector& second_moment() const noexcept { return second_; }

    // Used when resuming from a checkpoint.
    void restore(std::size_t steps, ParamVector first, ParamVector second);

private:
    OptimizerSpec spec_;
    std::size_t steps_ = 0;
    ParamVector first_;
    ParamVector second_;
};

}  // namespace vrs
