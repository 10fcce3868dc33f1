#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "vrs/model.hpp"

namespace vrs {

// Lower inverse-CDF quantile of the empirical distribution:
// the ceil(gamma * N)-th smallest value (1-based). gamma in (0, 1].
double empirical_quantile(std::vector<double> values, double gamma);

// Draws N proposals z ~ q(.|x) and returns the empirical gamma-quantile of
// log q(z|x) - log p(x,z).
double estimate_threshold(const Proposal& q, const LatentModel& model, ObsView x, double gamma, std::size_t N,
                          Rng& rng);

// Per-datapoint thresholds T(x). Starts at +inf everywhere and is replaced
// wholesale on refresh; a table is never modified in place.
class ThresholdTable {
public:
    ThresholdTable(std::size_t datapoints, double gamma, std::size_t refresh_every, std::size_t est_samples);

    std::size_t size() const noexcept { return values_.size(); }
    double at(std::size_t index) const { return values_.at(index); }
    std::span<const double> values() const noexcept { return values_; }

    double gamma() const noexcept { return gamma_; }
    std::size_t refresh_every() const noexcept { return refresh_every_; }
    std::size_t est_samples() const noexcept { return est_samples_; }

    ThresholdTable with_values(std::vector<double> values) const;

    // CSV sidecar: "schema_version,index,threshold" with +inf written as "inf".
    void write_csv(std::ostream& out) const;
    static ThresholdTable read_csv(std::istream& in, double gamma, std::size_t refresh_every,
                                   std::size_t est_samples);

private:
    std::vector<double> values_;
    double gamma_;
    std::size_t refresh_every_;
    std::size_t est_samples_;
};

// Re-estimates every datapoint's threshold with the current (theta, phi).
// One seed is drawn from rng; datapoint i then uses its own derived stream, so
// the result does not depend on `threads`.
ThresholdTable refresh_table(const ThresholdTable& table, const Proposal& q, const LatentModel& model,
                             std::span<const Observation> dataset, Rng& rng, std::size_t threads = 1);

}  // namespace vrs
