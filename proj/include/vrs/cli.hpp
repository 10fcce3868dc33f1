#pragma once

// Experiment drivers behind the `vrs` executable. Each driver is usable as a
// library call; `run` wires them to command-line parsing and exit codes.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrs/dataset.hpp"
#include "vrs/optimizer.hpp"
#include "vrs/trainer.hpp"

namespace vrs::cli {

enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kConfigError = 2,
    kDataError = 3,
    kNumericError = 4,
    kBudgetExhausted = 5,
};

// Maps an in-flight exception to an exit code.
int exit_code_for(const std::exception& e);

// --- grid-kl -------------------------------------------------------------

struct GridKlRow {
    double threshold;
    double exact_ZR;
    double exact_KL;
    double exact_RELBO;
};

inline constexpr const char* kGridKlHeader = "schema_version,T,exact_ZR,exact_KL,exact_RELBO";

std::vector<double> default_grid_thresholds();
std::vector<GridKlRow> grid_kl(std::span<const double> thresholds);
void write_grid_kl_csv(std::ostream& out, std::span<const GridKlRow> rows);

// --- toy-poisson ---------------------------------------------------------

struct ToyPoissonOptions {
    double rate = 10.0;
    int cutoff = 5;
    double floor_mass = 1e-30;
    double threshold = 50.0;
    double lr = 0.01;
    double momentum = 0.5;
    double phi0 = std::log(4.0);
    std::size_t steps = 20000;
    std::size_t S = 5;
    std::uint64_t seed = 0;
    std::size_t max_attempts = 10000;
};

struct ToyPoissonRow {
    std::size_t step;
    double phi;  // after the update
    double signal_mean;
    double accept_rate;
    std::size_t attempts;
};

inline constexpr const char* kToyPoissonHeader = "schema_version,step,phi,signal_mean,accept_rate,attempts";

std::vector<ToyPoissonRow> run_toy_poisson(const ToyPoissonOptions& opts);
void write_toy_poisson_csv(std::ostream& out, std::span<const ToyPoissonRow> rows);

// --- train-sbn -----------------------------------------------------------

struct TrainSbnOptions {
    std::string data_images;
    std::optional<std::string> data_labels;
    Binarize binarize = Binarize::threshold;
    std::size_t limit = 0;  // 0 = all images
    std::vector<std::size_t> hidden{200};
    TrainConfig train;
    double init_scale = 0.05;
    std::string out_dir;  // empty = keep results in memory only
    std::optional<std::string> resume;
};

struct TrainSbnResult {
    TrainResult result;
    std::vector<std::uint32_t> architecture;
    std::size_t train_images = 0;
};

TrainSbnResult run_train_sbn(const TrainSbnOptions& opts);

// --- eval ----------------------------------------------------------------

struct EvalOptions {
    std::string checkpoint;
    std::string data_images;
    Binarize binarize = Binarize::threshold;
    std::size_t limit = 0;
    std::size_t eval_k = 25;       // IS proposals per example
    std::size_t rs_accepted = 25;  // accepted R samples per example
    std::size_t n_Z = 1000;        // proposals for the log Z_R estimate
    std::optional<double> threshold;  // fixed T; otherwise per-example gamma-quantile
    std::size_t quantile_samples = 100;
    std::size_t max_attempts = 10000;
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct EvalExample {
    std::size_t index;
    double threshold;
    double is_bound;     // k = eval_k
    double is1_bound;    // k = 1
    double rs_bound;
};

struct EstimatorSummary {
    std::string estimator;
    std::size_t k;
    std::size_t examples;
    double mean_neg_bound;
    double se;
};

struct EvalReport {
    std::vector<EvalExample> examples;
    std::vector<EstimatorSummary> summary;  // is, is1, rs

    const EstimatorSummary& get(const std::string& estimator) const;
};

inline constexpr const char* kEvalExampleHeader = "schema_version,index,T,neg_is_bound,neg_is1_bound,neg_rs_bound";
inline constexpr const char* kEvalSummaryHeader = "schema_version,estimator,k,examples,mean_neg_bound,se";

EvalReport run_eval(const EvalOptions& opts);
void write_eval_examples_csv(std::ostream& out, const EvalReport& report);
void write_eval_summary_csv(std::ostream& out, const EvalReport& report);

// Mean and standard error of the mean.
std::pair<double, double> mean_and_se(std::span<const double> values);

// Full command line, without the program name. Writes CSV/reports to out and
// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vrs::cli
