#include "vrs/optimizer.hpp"

#include <cmath>

#include "vrs/errors.hpp"

namespace vrs {

OptimizerKind parse_optimizer_kind(const std::string& name) {
    if (name == "sgd" || name == "sgd_momentum") return OptimizerKind::sgd_momentum;
    if (name == "adam") return OptimizerKind::adam;
    throw ConfigError("optimizer: unknown kind '" + name + "' (expected sgd or adam)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::adam ? "adam" : "sgd"; }

Optimizer::Optimizer(OptimizerSpec spec, LayoutPtr layout) : spec_(spec), first_(layout), second_(layout) {
    if (!(spec_.learning_rate > 0.0)) throw ConfigError("optimizer: learning rate must be positive");
    if (!(spec_.momentum >= 0.0 && spec_.momentum < 1.0)) throw ConfigError("optimizer: momentum must be in [0, 1)");
    if (!(spec_.beta1 >= 0.0 && spec_.beta1 < 1.0) || !(spec_.beta2 >= 0.0 && spec_.beta2 < 1.0)) {
        throw ConfigError("optimizer: Adam betas must be in [0, 1)");
    }
}

void Optimizer::step(ParamVector& params, const ParamVector& grad) {
    params.require_same_layout(grad, "Optimizer::step");
    params.require_same_layout(first_, "Optimizer::step");
    ++steps_;
    const std::size_t n = params.size();
    if (spec_.kind == OptimizerKind::sgd_momentum) {
        for (std::size_t i = 0; i < n; ++i) {
            first_[i] = spec_.momentum * first_[i] + grad[i];
            params[i] += spec_.learning_rate * first_[i];
        }
        return;
    }
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(spec_.beta1, t);
    const double c2 = 1.0 - std::pow(spec_.beta2, t);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        first_[i] = spec_.beta1 * first_[i] + (1.0 - spec_.beta1) * g;
        second_[i] = spec_.beta2 * second_[i] + (1.0 - spec_.beta2) * g * g;
        const double mhat = first_[i] / c1;
        const double shat = second_[i] / c2;
        params[i] += spec_.learning_rate * mhat / (std::sqrt(shat) + spec_.epsilon);
    }
}

void Optimizer::restore(std::size_t steps, ParamVector first, ParamVector second) {
    first_.require_same_layout(first, "Optimizer::restore");
    first_.require_same_layout(second, "Optimizer::restore");
    steps_ = steps;
    first_ = std::move(first);
    second_ = std::move(second);
}

}  // namespace vrs
