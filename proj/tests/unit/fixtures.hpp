#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "vrs/oracle.hpp"
#include "vrs/rng.hpp"
#include "vrs/sbn.hpp"

namespace vrs::test {

// Every entry (weights and biases) uniform in [-scale, scale].
inline ParamVector random_like(const ParamVector& p, Rng& rng, double scale) {
    ParamVector out = ParamVector::zeros_like(p);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (double& v : out.values()) v = u(rng);
    return out;
}

struct TinySbn {
    SbnShape shape;
    SbnGenerative model;
    SbnRecognition q;
    Observation x;
    oracle::EnumerableSpace space;

    TinySbn(SbnShape s, std::uint64_t seed, double scale)
        : shape(s), model(s), q(s), x(s.visible), space(oracle::EnumerableSpace::binary(s.latent_dim())) {
        Rng rng(seed);
        model.set_params(random_like(model.params(), rng, scale));
        q.set_params(random_like(q.params(), rng, scale));
        for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1U);
    }
};

inline double rel_err(double got, double want, double floor = 1e-12) {
    return std::abs(got - want) / std::max(std::abs(want), floor);
}

inline double max_rel_err(const ParamVector& got, const ParamVector& want, double floor) {
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(std::abs(want[i]), floor));
    }
    return worst;
}

}  // namespace vrs::test
