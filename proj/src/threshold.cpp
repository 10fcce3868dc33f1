#include "vrs/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "vrs/errors.hpp"
#include "vrs/numerics.hpp"
#include "vrs/parallel.hpp"

namespace vrs {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("quantile gamma must lie in (0, 1]");
}

std::string format_threshold(double t) {
    if (t == kInf) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << t;
    return os.str();
}

double parse_threshold(const std::string& s) {
    if (s == "inf" || s == "+inf") return kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) throw FormatError("bad threshold value '" + s + "'", 0);
    return v;
}

}  // namespace

double empirical_quantile(std::vector<double> values, double gamma) {
    check_gamma(gamma);
    if (values.empty()) throw PreconditionError("empirical_quantile: no values");
    const auto n = values.size();
    // The slack keeps e.g. 0.7 * 10 = 7.000000000000001 at rank 7.
    auto rank = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
}

double estimate_threshold(const Proposal& q, const LatentModel& model, ObsView x, double gamma, std::size_t N,
                          Rng& rng) {
    check_gamma(gamma);
    if (N == 0) throw PreconditionError("estimate_threshold: N must be at least 1");
    std::vector<double> ratios(N);
    for (std::size_t i = 0; i < N; ++i) {
        const Latent z = q.sample(x, rng);
        ratios[i] = q.log_prob(x, z) - model.log_joint(x, z);
    }
    return empirical_quantile(std::move(ratios), gamma);
}

ThresholdTable::ThresholdTable(std::size_t datapoints, double gamma, std::size_t refresh_every,
                               std::size_t est_samples)
    : values_(datapoints, kInf), gamma_(gamma), refresh_every_(refresh_every), est_samples_(est_samples) {
    check_gamma(gamma);
    if (est_samples == 0) throw PreconditionError("ThresholdTable: N must be at least 1");
    if (refresh_every == 0) throw PreconditionError("ThresholdTable: refresh period must be at least 1");
}

ThresholdTable ThresholdTable::with_values(std::vector<double> values) const {
    for (double v : values) {
        if (std::isnan(v) || v == -kInf) throw NumericError("ThresholdTable: thresholds must be finite or +inf");
    }
    ThresholdTable t = *this;
    t.values_ = std::move(values);
    return t;
}

void ThresholdTable::write_csv(std::ostream& out) const {
    out << "schema_version,index,threshold\n";
    for (std::size_t i = 0; i < values_.size(); ++i) out << "1," << i << ',' << format_threshold(values_[i]) << '\n';
}

ThresholdTable ThresholdTable::read_csv(std::istream& in, double gamma, std::size_t refresh_every,
                                        std::size_t est_samples) {
    std::string line;
    if (!std::getline(in, line) || line != "schema_version,index,threshold") {
        throw FormatError("threshold CSV: missing header", 0);
    }
    std::vector<double> values;
    std::size_t offset = line.size() + 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string version;
        std::string index;
        std::string value;
        if (!std::getline(row, version, ',') || !std::getline(row, index, ',') || !std::getline(row, value)) {
            throw FormatError("threshold CSV: malformed row", offset);
        }
        if (version != "1") throw FormatError("threshold CSV: unsupported schema version " + version, offset);
        if (index != std::to_string(values.size())) throw FormatError("threshold CSV: indices out of order", offset);
        try {
            values.push_back(parse_threshold(value));
        } catch (const FormatError&) {
            throw FormatError("threshold CSV: bad threshold '" + value + "'", offset);
        }
        offset += line.size() + 1;
    }
    return ThresholdTable(values.size(), gamma, refresh_every, est_samples).with_values(std::move(values));
}

ThresholdTable refresh_table(const ThresholdTable& table, const Proposal& q, const LatentModel& model,
                             std::span<const Observation> dataset, Rng& rng, std::size_t threads) {
    if (dataset.size() != table.size()) throw ShapeError("refresh_table: dataset size differs from table size");
    const std::uint64_t base = rng();
    std::vector<double> fresh(dataset.size());
    parallel_for(dataset.size(), threads, [&](std::size_t i) {
        Rng local = derive_stream(base, {i});
        fresh[i] = estimate_threshold(q, model, dataset[i], table.gamma(), table.est_samples(), local);
    });
    return table.with_values(std::move(fresh));
}

}  // namespace vrs
