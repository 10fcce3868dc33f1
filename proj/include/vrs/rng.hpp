#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace vrs {

using Rng = std::mt19937_64;

// Independent stream keyed by (seed, keys...). Used to give every
// (epoch, datapoint) its own generator so results do not depend on thread count.
inline Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * keys.size());
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    for (auto k : keys) {
        words.push_back(static_cast<std::uint32_t>(k));
        words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace vrs
