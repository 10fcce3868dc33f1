#include "vrs/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "vrs/checkpoint.hpp"
#include "vrs/errors.hpp"
#include "vrs/grid.hpp"
#include "vrs/oracle.hpp"
#include "vrs/poisson.hpp"
#include "vrs/resampler.hpp"
#include "vrs/rng.hpp"
#include "vrs/sbn.hpp"
#include "vrs/threshold.hpp"

namespace vrs::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::uint64_t kInitStream = 100;
constexpr std::uint64_t kEvalStream = 200;

void set_csv_precision(std::ostream& out) { out << std::setprecision(std::numeric_limits<double>::max_digits10); }

std::string format_threshold(double T) { return T == kInf ? "inf" : (std::ostringstream() << T).str(); }

double parse_double(const std::string& field, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(field + ": cannot parse '" + text + "' as a number");
    }
    if (used != text.size()) throw ConfigError(field + ": cannot parse '" + text + "' as a number");
    return v;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_threshold_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        const double T = parse_double("T", item);
        if (std::isnan(T) || T == -kInf) throw ConfigError("T: thresholds must be finite or +inf");
        out.push_back(T);
    }
    if (out.empty()) throw ConfigError("T: empty threshold list");
    return out;
}

std::vector<std::size_t> parse_hidden(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) {
        const double v = parse_double("hidden", item);
        if (v < 1 || v != std::floor(v)) throw ConfigError("hidden: layer widths must be positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw ConfigError("hidden: at least one layer is required");
    return out;
}

std::optional<double> parse_optional_threshold(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const double T = parse_double("T", text);
    if (std::isnan(T) || T == -kInf) throw ConfigError("T: must be finite or +inf");
    return T;
}

Dataset load_dataset(const std::string& images, const std::optional<std::string>& labels, Binarize mode,
                     std::size_t limit, std::uint64_t seed) {
    if (images.empty()) throw ConfigError("data-images: required");
    Dataset ds = ingest_idx(images, labels, mode, seed);
    if (limit > 0 && limit < ds.size()) ds = ds.slice(0, limit, ds.split);
    if (ds.size() == 0) throw ConfigError("data-images: no images loaded");
    return ds;
}

std::vector<std::uint32_t> architecture_of(const SbnShape& shape) {
    std::vector<std::uint32_t> arch{static_cast<std::uint32_t>(shape.visible)};
    for (auto h : shape.hidden) arch.push_back(static_cast<std::uint32_t>(h));
    return arch;
}

SbnShape shape_of(const std::vector<std::uint32_t>& arch) {
    if (arch.size() < 2) throw FormatError("checkpoint: architecture needs visible and hidden widths", 12);
    SbnShape shape;
    shape.visible = arch[0];
    shape.hidden.assign(arch.begin() + 1, arch.end());
    return shape;
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
    std::ofstream out(path, std::ios::out | mode);
    if (!out) throw ConfigError("out-dir: cannot write '" + path.string() + "'");
    set_csv_precision(out);
    return out;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const BudgetExhausted*>(&e)) return kBudgetExhausted;
    if (dynamic_cast<const NumericError*>(&e)) return kNumericError;
    if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const ShapeError*>(&e) ||
        dynamic_cast<const DomainError*>(&e)) {
        return kDataError;
    }
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
        dynamic_cast<const CLI::Error*>(&e)) {
        return kConfigError;
    }
    return kUnexpected;
}

std::pair<double, double> mean_and_se(std::span<const double> values) {
    const double n = static_cast<double>(values.size());
    if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// --- grid-kl -------------------------------------------------------------

std::vector<double> default_grid_thresholds() { return {kInf, 10.0, 5.0, 0.0, -2.0, -5.0}; }

std::vector<GridKlRow> grid_kl(std::span<const double> thresholds) {
    const GridTarget target = make_grid_fixture();
    const CategoricalProposal uniform(target.cells());
    const auto space = oracle::EnumerableSpace::categorical(target.cells());
    const Observation x;
    std::vector<GridKlRow> rows;
    for (double T : thresholds) {
        const ResampledProposal rp(uniform, target, T);
        rows.push_back(GridKlRow{T, oracle::exact_ZR(rp, x, space), oracle::exact_kl_R_P(rp, x, space),
                                 oracle::exact_relbo(rp, x, space)});
    }
    return rows;
}

void write_grid_kl_csv(std::ostream& out, std::span<const GridKlRow> rows) {
    set_csv_precision(out);
    out << kGridKlHeader << '\n';
    for (const auto& r : rows) {
        out << kSchemaVersion << ',' << format_threshold(r.threshold) << ',' << r.exact_ZR << ',' << r.exact_KL
            << ',' << r.exact_RELBO << '\n';
    }
}

// --- toy-poisson ---------------------------------------------------------

std::vector<ToyPoissonRow> run_toy_poisson(const ToyPoissonOptions& opts) {
    if (opts.steps == 0) throw ConfigError("steps: must be at least 1");
    TruncatedPoissonTarget target(opts.rate, opts.cutoff, opts.floor_mass);
    PoissonProposal proposal(opts.phi0);
    const std::vector<Observation> data(1);

    TrainConfig cfg;
    cfg.fixed_threshold = opts.threshold;
    cfg.covariance_samples = opts.S;
    cfg.epochs = opts.steps;
    cfg.batch_size = 1;
    cfg.seed = opts.seed;
    cfg.max_attempts = opts.max_attempts;
    cfg.optimizer.kind = OptimizerKind::sgd_momentum;
    cfg.optimizer.learning_rate = opts.lr;
    cfg.optimizer.momentum = opts.momentum;

    std::vector<ToyPoissonRow> rows;
    rows.reserve(opts.steps);
    TrainHooks hooks;
    hooks.on_step = [&](const StepRecord& r) {
        rows.push_back(ToyPoissonRow{r.step, proposal.phi(), r.signal_mean, r.accept_rate, r.attempts});
    };
    train(target, proposal, data, cfg, hooks);
    return rows;
}

void write_toy_poisson_csv(std::ostream& out, std::span<const ToyPoissonRow> rows) {
    set_csv_precision(out);
    out << kToyPoissonHeader << '\n';
    for (const auto& r : rows) {
        out << kSchemaVersion << ',' << r.step << ',' << r.phi << ',' << r.signal_mean << ',' << r.accept_rate << ','
            << r.attempts << '\n';
    }
}

// --- train-sbn -----------------------------------------------------------

TrainSbnResult run_train_sbn(const TrainSbnOptions& opts) {
    opts.train.validate();
    const Dataset ds = load_dataset(opts.data_images, opts.data_labels, opts.binarize, opts.limit, opts.train.seed);

    const SbnShape shape{ds.dim(), opts.hidden};
    SbnGenerative model(shape);
    SbnRecognition proposal(shape);
    Rng init = derive_stream(opts.train.seed, {kInitStream});
    model.randomize(init, opts.init_scale);
    proposal.randomize(init, opts.init_scale);
    const auto arch = architecture_of(shape);

    std::optional<ResumeState> resume;
    if (opts.resume) {
        const Checkpoint ck = load_checkpoint(*opts.resume);
        if (ck.architecture != arch) throw ConfigError("resume: checkpoint architecture does not match --hidden/data");
        if (ck.optimizer_kind != opts.train.optimizer.kind) throw ConfigError("resume: optimizer kind differs");
        model.set_params(restore_params(ck.theta, model.params().layout()));
        proposal.set_params(restore_params(ck.phi, proposal.params().layout()));
        ResumeState rs;
        rs.epoch = ck.epoch;
        rs.step = ck.step;
        rs.thresholds = ck.thresholds;
        rs.theta_steps = ck.theta.optimizer_steps;
        rs.theta_first = restore_first_moment(ck.theta, model.params().layout());
        rs.theta_second = restore_second_moment(ck.theta, model.params().layout());
        rs.phi_steps = ck.phi.optimizer_steps;
        rs.phi_first = restore_first_moment(ck.phi, proposal.params().layout());
        rs.phi_second = restore_second_moment(ck.phi, proposal.params().layout());
        resume = std::move(rs);
    }

    TrainHooks hooks;
    std::ofstream metrics_out;
    const fs::path out_dir = opts.out_dir;
    if (!opts.out_dir.empty()) {
        fs::create_directories(out_dir);
        const bool append = resume.has_value() && fs::exists(out_dir / "metrics.csv");
        metrics_out = open_output(out_dir / "metrics.csv", append ? std::ios::app : std::ios::trunc);
        if (!append) metrics_out << TrainMetrics::kCsvHeader << '\n';
        hooks.on_step = [&](const StepRecord& r) { TrainMetrics::write_csv_row(metrics_out, r); };
        hooks.on_epoch_end = [&](const TrainSnapshot& snap) {
            metrics_out.flush();
            Checkpoint ck;
            ck.architecture = arch;
            ck.epoch = snap.epoch;
            ck.step = snap.step;
            ck.optimizer_kind = opts.train.optimizer.kind;
            ck.theta = make_block(snap.model.params(), snap.theta_optimizer);
            ck.phi = make_block(snap.proposal.params(), snap.phi_optimizer);
            ck.gamma = snap.thresholds.gamma();
            ck.refresh_period = snap.thresholds.refresh_every();
            ck.quantile_samples = snap.thresholds.est_samples();
            ck.thresholds.assign(snap.thresholds.values().begin(), snap.thresholds.values().end());
            save_checkpoint((out_dir / ("checkpoint-epoch" + std::to_string(snap.epoch) + ".bin")).string(), ck);
            save_checkpoint((out_dir / "checkpoint.bin").string(), ck);
            auto th = open_output(out_dir / "thresholds.csv");
            snap.thresholds.write_csv(th);
        };
    }

    TrainSbnResult out{train(model, proposal, ds.images, opts.train, hooks, resume ? &*resume : nullptr), arch,
                       ds.size()};

    if (!opts.out_dir.empty()) {
        const auto& t = opts.train;
        nlohmann::json meta = {
            {"schema_version", kSchemaVersion},
            {"command", "train-sbn"},
            {"data_images", opts.data_images},
            {"binarize", to_string(opts.binarize)},
            {"train_images", ds.size()},
            {"architecture", arch},
            {"gamma", t.gamma},
            {"S", t.covariance_samples},
            {"N", t.quantile_samples},
            {"refresh_steps", t.refresh_steps},
            {"T", t.fixed_threshold ? format_threshold(*t.fixed_threshold) : "table"},
            {"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"optimizer", to_string(t.optimizer.kind)},
            {"lr", t.optimizer.learning_rate},
            {"momentum", t.optimizer.momentum},
            {"seed", t.seed},
            {"max_attempts", t.max_attempts},
            {"threads", t.threads},
            {"resumed_from", opts.resume ? *opts.resume : ""},
            {"steps", out.result.metrics.records().size()},
        };
        auto f = open_output(out_dir / "run.json");
        f << meta.dump(2) << '\n';
    }
    return out;
}

// --- eval ----------------------------------------------------------------

const EstimatorSummary& EvalReport::get(const std::string& estimator) const {
    for (const auto& s : summary) {
        if (s.estimator == estimator) return s;
    }
    throw PreconditionError("EvalReport: no estimator named '" + estimator + "'");
}

EvalReport run_eval(const EvalOptions& opts) {
    if (opts.checkpoint.empty()) throw ConfigError("checkpoint: required");
    if (!fs::exists(opts.checkpoint)) throw ConfigError("checkpoint: '" + opts.checkpoint + "' does not exist");
    if (opts.eval_k == 0) throw ConfigError("eval-k: must be at least 1");
    if (opts.rs_accepted == 0) throw ConfigError("rs-accepted: must be at least 1");
    if (opts.n_Z == 0) throw ConfigError("n-z: must be at least 1");
    if (opts.quantile_samples == 0) throw ConfigError("N: must be at least 1");

    const Checkpoint ck = load_checkpoint(opts.checkpoint);
    const SbnShape shape = shape_of(ck.architecture);
    SbnGenerative model(shape);
    SbnRecognition proposal(shape);
    model.set_params(restore_params(ck.theta, model.params().layout()));
    proposal.set_params(restore_params(ck.phi, proposal.params().layout()));

    const Dataset ds = load_dataset(opts.data_images, std::nullopt, opts.binarize, opts.limit, opts.seed);
    if (ds.dim() != shape.visible) {
        throw ShapeError("eval: images have " + std::to_string(ds.dim()) + " pixels, model expects " +
                         std::to_string(shape.visible));
    }

    EvalReport report;
    std::vector<double> neg_is, neg_is1, neg_rs;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& x = ds.images[i];
        Rng rng = derive_stream(opts.seed, {kEvalStream, i});
        const double T = opts.threshold ? *opts.threshold
                                        : estimate_threshold(proposal, model, x, ck.gamma, opts.quantile_samples, rng);
        const ResampledProposal rp(proposal, model, T, opts.max_attempts);
        EvalExample ex{i, T, eval_is_bound(model, proposal, x, opts.eval_k, rng),
                       eval_is_bound(model, proposal, x, 1, rng),
                       eval_rs_bound(rp, x, opts.rs_accepted, opts.n_Z, rng)};
        neg_is.push_back(-ex.is_bound);
        neg_is1.push_back(-ex.is1_bound);
        neg_rs.push_back(-ex.rs_bound);
        report.examples.push_back(ex);
    }

    auto summarize = [&](const char* name, std::size_t k, const std::vector<double>& v) {
        const auto [m, se] = mean_and_se(v);
        report.summary.push_back(EstimatorSummary{name, k, v.size(), m, se});
    };
    summarize("is", opts.eval_k, neg_is);
    summarize("is1", 1, neg_is1);
    summarize("rs", opts.rs_accepted, neg_rs);

    if (!opts.out_dir.empty()) {
        fs::create_directories(opts.out_dir);
        auto ex = open_output(fs::path(opts.out_dir) / "eval_examples.csv");
        write_eval_examples_csv(ex, report);
        auto sm = open_output(fs::path(opts.out_dir) / "eval_summary.csv");
        write_eval_summary_csv(sm, report);
    }
    return report;
}

void write_eval_examples_csv(std::ostream& out, const EvalReport& report) {
    set_csv_precision(out);
    out << kEvalExampleHeader << '\n';
    for (const auto& e : report.examples) {
        out << kSchemaVersion << ',' << e.index << ',' << format_threshold(e.threshold) << ',' << -e.is_bound << ','
            << -e.is1_bound << ',' << -e.rs_bound << '\n';
    }
}

void write_eval_summary_csv(std::ostream& out, const EvalReport& report) {
    set_csv_precision(out);
    out << kEvalSummaryHeader << '\n';
    for (const auto& s : report.summary) {
        out << kSchemaVersion << ',' << s.estimator << ',' << s.k << ',' << s.examples << ',' << s.mean_neg_bound
            << ',' << s.se << '\n';
    }
}

// --- command line --------------------------------------------------------

namespace {

// Splices `--config FILE` (flat key=value lines) into the argument list right
// after the subcommand, so flags given explicitly come later and win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("config: missing file name");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) return args;
    std::ifstream in(*path);
    if (!in) throw ConfigError("config: cannot open '" + *path + "'");

    std::vector<std::string> injected;
    for (const auto& item : CLI::ConfigINI().from_config(in)) {
        if (item.name == "++" || item.name == "--") continue;
        if (!item.parents.empty()) throw ConfigError("config: sections are not supported ('" + item.fullname() + "')");
        injected.push_back("--" + item.name);
        for (const auto& v : item.inputs) injected.push_back(v);
    }
    if (rest.empty()) throw ConfigError("config: a subcommand is required");
    rest.insert(rest.begin() + 1, injected.begin(), injected.end());
    return rest;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Variational rejection sampling experiments", "vrs"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    // grid-kl
    std::string grid_T = "inf,10,5,0,-2,-5";
    auto* grid = app.add_subcommand("grid-kl", "Exact Z_R, KL(R||P) and R-ELBO on the 5x5 grid fixture");
    grid->add_option("--T", grid_T, "Comma-separated thresholds (inf allowed)");

    // toy-poisson
    ToyPoissonOptions toy;
    std::string toy_out;
    auto* toyc = app.add_subcommand("toy-poisson", "SGD on the truncated-Poisson toy with a fixed threshold");
    toyc->add_option("--T", toy.threshold, "Fixed threshold");
    toyc->add_option("--lr", toy.lr);
    toyc->add_option("--momentum", toy.momentum);
    toyc->add_option("--phi0", toy.phi0, "Initial log-rate");
    toyc->add_option("--steps", toy.steps);
    toyc->add_option("--S", toy.S, "Accepted samples per step");
    toyc->add_option("--rate", toy.rate, "Target Poisson rate");
    toyc->add_option("--cutoff", toy.cutoff, "Mass below this count is floored");
    toyc->add_option("--seed", toy.seed);
    toyc->add_option("--max-attempts", toy.max_attempts);
    toyc->add_option("--out", toy_out, "CSV path (default stdout)");

    // train-sbn
    TrainSbnOptions sbn;
    std::string sbn_hidden = "200", sbn_T, sbn_opt = "adam", sbn_binarize = "threshold", sbn_resume, sbn_labels;
    sbn.train.epochs = 5;
    auto* sbnc = app.add_subcommand("train-sbn", "Train a sigmoid belief network on IDX images");
    sbnc->add_option("--data-images", sbn.data_images)->required();
    sbnc->add_option("--data-labels", sbn_labels);
    sbnc->add_option("--binarize", sbn_binarize, "threshold or sample");
    sbnc->add_option("--limit", sbn.limit, "Use only the first N images (0 = all)");
    sbnc->add_option("--hidden", sbn_hidden, "Comma-separated hidden widths, nearest the data first");
    sbnc->add_option("--gamma", sbn.train.gamma);
    sbnc->add_option("--S", sbn.train.covariance_samples);
    sbnc->add_option("--N", sbn.train.quantile_samples);
    sbnc->add_option("--refresh-steps", sbn.train.refresh_steps, "Steps between threshold refreshes (0 = each epoch)");
    sbnc->add_option("--T", sbn_T, "Fixed threshold instead of the quantile table");
    sbnc->add_option("--epochs", sbn.train.epochs);
    sbnc->add_option("--batch-size", sbn.train.batch_size);
    sbnc->add_option("--lr", sbn.train.optimizer.learning_rate);
    sbnc->add_option("--optimizer", sbn_opt, "sgd or adam");
    sbnc->add_option("--momentum", sbn.train.optimizer.momentum);
    sbnc->add_option("--seed", sbn.train.seed);
    sbnc->add_option("--max-attempts", sbn.train.max_attempts);
    sbnc->add_option("--threads", sbn.train.threads);
    sbnc->add_option("--init-scale", sbn.init_scale);
    sbnc->add_option("--resume", sbn_resume, "Checkpoint to continue from");
    sbnc->add_option("--out-dir", sbn.out_dir)->required();

    // eval
    EvalOptions ev;
    std::string ev_T, ev_binarize = "threshold";
    auto* evc = app.add_subcommand("eval", "IS and RS bounds for a checkpoint on IDX images");
    evc->add_option("--checkpoint", ev.checkpoint)->required();
    evc->add_option("--data-images", ev.data_images)->required();
    evc->add_option("--binarize", ev_binarize);
    evc->add_option("--limit", ev.limit);
    evc->add_option("--eval-k", ev.eval_k, "IS proposals per example");
    evc->add_option("--rs-accepted", ev.rs_accepted, "Accepted R samples per example");
    evc->add_option("--n-z", ev.n_Z, "Proposals for the log Z_R estimate");
    evc->add_option("--T", ev_T, "Fixed threshold (inf allowed); default re-estimates per example");
    evc->add_option("--N", ev.quantile_samples);
    evc->add_option("--max-attempts", ev.max_attempts);
    evc->add_option("--seed", ev.seed);
    evc->add_option("--out-dir", ev.out_dir);

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? kOk : kConfigError;
        }

        if (grid->parsed()) {
            const auto thresholds = parse_threshold_list(grid_T);
            write_grid_kl_csv(out, grid_kl(thresholds));
        } else if (toyc->parsed()) {
            const auto rows = run_toy_poisson(toy);
            if (toy_out.empty()) {
                write_toy_poisson_csv(out, rows);
            } else {
                auto f = open_output(toy_out);
                write_toy_poisson_csv(f, rows);
                out << "final phi " << rows.back().phi << '\n';
            }
        } else if (sbnc->parsed()) {
            sbn.hidden = parse_hidden(sbn_hidden);
            sbn.binarize = parse_binarize(sbn_binarize);
            sbn.train.optimizer.kind = parse_optimizer_kind(sbn_opt);
            sbn.train.fixed_threshold = parse_optional_threshold(sbn_T);
            if (!sbn_labels.empty()) sbn.data_labels = sbn_labels;
            if (!sbn_resume.empty()) sbn.resume = sbn_resume;
            const auto res = run_train_sbn(sbn);
            const auto& recs = res.result.metrics.records();
            out << "trained " << recs.size() << " steps on " << res.train_images << " images; outputs in "
                << sbn.out_dir << '\n';
        } else if (evc->parsed()) {
            ev.binarize = parse_binarize(ev_binarize);
            ev.threshold = parse_optional_threshold(ev_T);
            const auto report = run_eval(ev);
            write_eval_summary_csv(out, report);
        }
        return kOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace vrs::cli
