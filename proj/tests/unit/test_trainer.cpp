#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "vrs/checkpoint.hpp"
#include "vrs/errors.hpp"
#include "vrs/grad.hpp"
#include "vrs/grid.hpp"
#include "vrs/oracle.hpp"
#include "vrs/poisson.hpp"
#include "vrs/trainer.hpp"

using namespace vrs;

namespace {

LayoutPtr flat_layout(std::size_t n) { return ParamLayout::Builder().add("p", n).build(); }

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

template <class F>
MeanSe replicate(std::size_t reps, F&& draw) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        const double v = draw(i);
        sum += v;
        sq += v * v;
    }
    const double n = static_cast<double>(reps);
    const double mean = sum / n;
    const double var = (sq - n * mean * mean) / (n - 1.0);
    return {mean, std::sqrt(std::max(var, 0.0) / n)};
}

// Gradient hook that replaces the sampled estimator by its exact expectation.
GradientAccumulator exact_hook(const oracle::EnumerableSpace& space) {
    return [&space](const ResampledProposal& rp, ObsView x, Rng&, std::size_t, double scale, ParamVector& d_theta,
                    ParamVector& d_phi) {
        const oracle::ExactGradient g = oracle::exact_relbo_grad(rp, x, space);
        d_theta.add_scaled(scale, g.d_theta);
        d_phi.add_scaled(scale, g.d_phi);
        return EstimateStats{1, 1, 0.0};
    };
}

std::vector<Observation> tiny_dataset(const SbnGenerative& model, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Observation> data;
    for (std::size_t i = 0; i < n; ++i) data.push_back(model.sample_joint(rng).first);
    return data;
}

TrainConfig tiny_config() {
    TrainConfig c;
    c.gamma = 0.8;
    c.refresh_steps = 3;
    c.quantile_samples = 20;
    c.covariance_samples = 3;
    c.epochs = 2;
    c.batch_size = 8;
    c.optimizer.learning_rate = 1e-2;
    c.seed = 17;
    return c;
}

void check_identical(const std::vector<StepRecord>& a, const std::vector<StepRecord>& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].epoch == b[i].epoch);
        CHECK(a[i].step == b[i].step);
        CHECK(a[i].signal_mean == b[i].signal_mean);
        CHECK(a[i].accept_rate == b[i].accept_rate);
        CHECK(a[i].attempts == b[i].attempts);
        CHECK(a[i].grad_norm_theta == b[i].grad_norm_theta);
        CHECK(a[i].grad_norm_phi == b[i].grad_norm_phi);
    }
}

void check_identical(const ParamVector& a, const ParamVector& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

}  // namespace

TEST_CASE("momentum SGD follows its recurrence on a scripted gradient sequence") {
    const auto layout = flat_layout(1);
    OptimizerSpec spec{OptimizerKind::sgd_momentum, 0.1, 0.5};
    Optimizer opt(spec, layout);
    ParamVector p(layout);
    const double grads[] = {1.0, -2.0, 0.5};
    const double want[] = {0.1, -0.05, -0.075};
    for (int t = 0; t < 3; ++t) {
        opt.step(p, ParamVector(layout, {grads[t]}));
        CHECK(p[0] == doctest::Approx(want[t]).epsilon(1e-15));
    }
    CHECK(opt.step_count() == 3);
}

TEST_CASE("Adam follows its bias-corrected recurrence on a scripted gradient sequence") {
    const auto layout = flat_layout(2);
    OptimizerSpec spec;
    spec.kind = OptimizerKind::adam;
    spec.learning_rate = 0.1;
    Optimizer opt(spec, layout);
    ParamVector p(layout, {0.0, 1.0});
    const std::vector<std::vector<double>> grads = {{1.0, -0.5}, {-2.0, 0.25}, {0.5, 3.0}};
    const std::vector<std::vector<double>> want = {{0.09999999900000002, 0.900000002},
                                                   {0.06338964652792518, 0.8733662987078463},
                                                   {0.04972058032617855, 0.9324004368027249}};
    for (std::size_t t = 0; t < 3; ++t) {
        opt.step(p, ParamVector(layout, grads[t]));
        CHECK(p[0] == doctest::Approx(want[t][0]).epsilon(1e-13));
        CHECK(p[1] == doctest::Approx(want[t][1]).epsilon(1e-13));
    }
    CHECK(opt.first_moment().same_layout(p));
    CHECK(opt.second_moment().same_layout(p));
}

TEST_CASE("optimizer names and layout checks") {
    CHECK(parse_optimizer_kind("sgd") == OptimizerKind::sgd_momentum);
    CHECK(parse_optimizer_kind("adam") == OptimizerKind::adam);
    CHECK(parse_optimizer_kind(to_string(OptimizerKind::sgd_momentum)) == OptimizerKind::sgd_momentum);
    CHECK_THROWS_AS(parse_optimizer_kind("rmsprop"), ConfigError);

    Optimizer opt(OptimizerSpec{}, flat_layout(2));
    ParamVector wrong(flat_layout(3));
    ParamVector g(flat_layout(3));
    CHECK_THROWS_AS(opt.step(wrong, g), ShapeError);
}

TEST_CASE("train config validation names the offending field") {
    auto expect_field = [](TrainConfig c, const std::string& field) {
        try {
            c.validate();
            FAIL("expected ConfigError for " << field);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).rfind(field + ":", 0) == 0);
        }
    };
    TrainConfig ok;
    CHECK_NOTHROW(ok.validate());
    ok.gamma = 1.0;
    CHECK_NOTHROW(ok.validate());

    TrainConfig c;
    c.gamma = 0.0;
    expect_field(c, "gamma");
    c = {};
    c.gamma = 1.5;
    expect_field(c, "gamma");
    c = {};
    c.covariance_samples = 1;
    expect_field(c, "S");
    c = {};
    c.quantile_samples = 0;
    expect_field(c, "N");
    c = {};
    c.epochs = 0;
    expect_field(c, "epochs");
    c = {};
    c.batch_size = 0;
    expect_field(c, "batch_size");
    c = {};
    c.optimizer.learning_rate = -1.0;
    expect_field(c, "lr");
    c = {};
    c.fixed_threshold = -kInf;
    expect_field(c, "T");

    SbnShape shape{3, {2}};
    SbnGenerative model(shape);
    SbnRecognition q(shape);
    CHECK_THROWS_AS(train(model, q, {}, TrainConfig{}), ConfigError);
}

TEST_CASE("training is deterministic and independent of the thread count") {
    const SbnShape shape{6, {4, 2}};
    auto run = [&](std::size_t threads) {
        SbnGenerative model(shape);
        SbnRecognition q(shape);
        Rng init(5);
        model.randomize(init, 0.3);
        q.randomize(init, 0.3);
        const auto data = tiny_dataset(model, 20, 9);
        TrainConfig c = tiny_config();
        c.threads = threads;
        return train(model, q, data, c);
    };
    const TrainResult a = run(1);
    const TrainResult b = run(1);
    const TrainResult c = run(3);
    CHECK(a.metrics.records().size() == 2 * 3);
    check_identical(a.metrics.records(), b.metrics.records());
    check_identical(a.metrics.records(), c.metrics.records());
    check_identical(a.theta, c.theta);
    check_identical(a.phi, c.phi);
    REQUIRE(a.thresholds.size() == c.thresholds.size());
    for (std::size_t i = 0; i < a.thresholds.size(); ++i) CHECK(a.thresholds.at(i) == c.thresholds.at(i));
    for (std::size_t i = 0; i < a.thresholds.size(); ++i) CHECK(std::isfinite(a.thresholds.at(i)));
}

TEST_CASE("metrics have one record per update and a stable CSV schema") {
    const SbnShape shape{5, {3}};
    SbnGenerative model(shape);
    SbnRecognition q(shape);
    const auto data = tiny_dataset(model, 10, 1);
    TrainConfig c = tiny_config();
    c.batch_size = 4;
    c.epochs = 3;
    std::vector<std::size_t> seen;
    TrainHooks hooks;
    hooks.on_step = [&](const StepRecord& r) { seen.push_back(r.step); };
    std::size_t epoch_ends = 0;
    hooks.on_epoch_end = [&](const TrainSnapshot& s) {
        ++epoch_ends;
        CHECK(s.step == 3 * s.epoch);
        CHECK(s.theta_optimizer.step_count() == s.step);
    };
    const TrainResult r = train(model, q, data, c, hooks);
    REQUIRE(r.metrics.records().size() == 9);
    CHECK(epoch_ends == 3);
    for (std::size_t i = 0; i < seen.size(); ++i) {
        CHECK(seen[i] == i);
        CHECK(r.metrics.records()[i].epoch == i / 3);
        CHECK(r.metrics.records()[i].attempts >= 4 * c.covariance_samples);
        CHECK(r.metrics.records()[i].accept_rate > 0.0);
        CHECK(r.metrics.records()[i].accept_rate <= 1.0);
    }
    std::ostringstream os;
    r.metrics.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "schema_version,epoch,step,signal_mean,accept_rate,attempts,grad_norm_theta,grad_norm_phi,wall_ms");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        CHECK(line.rfind("1,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 9);
}

TEST_CASE("exact-gradient ascent never decreases the R-ELBO") {
    test::TinySbn f(SbnShape{4, {3, 2}}, 23, 1.0);
    const std::vector<Observation> data = {f.x};
    TrainConfig c;
    c.epochs = 100;
    c.batch_size = 1;
    c.fixed_threshold = kInf;
    c.optimizer = OptimizerSpec{OptimizerKind::sgd_momentum, 1e-3, 0.0};
    TrainHooks hooks;
    hooks.gradient = exact_hook(f.space);
    auto relbo = [&] { return oracle::exact_relbo(ResampledProposal(f.q, f.model, kInf), f.x, f.space); };
    std::vector<double> trace{relbo()};
    hooks.on_step = [&](const StepRecord&) { trace.push_back(relbo()); };
    train(f.model, f.q, data, c, hooks);
    REQUIRE(trace.size() == 101);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1]);
    CHECK(trace.back() > trace.front());
    CHECK(trace.back() <= oracle::exact_log_evidence(f.model, f.x, f.space));
}

TEST_CASE("toy Poisson: sampled and exact gradient flows both reach log 10") {
    const double phi_star = std::log(10.0);
    TruncatedPoissonTarget target(10.0, 5);
    const std::vector<Observation> data = {Observation{}};
    TrainConfig c;
    c.epochs = 20000;
    c.batch_size = 1;
    c.covariance_samples = 5;
    c.fixed_threshold = 50.0;
    c.optimizer = OptimizerSpec{OptimizerKind::sgd_momentum, 0.01, 0.5};

    const auto space = oracle::EnumerableSpace::integers(target.support_cap());
    PoissonProposal exact_q(std::log(4.0));
    TrainHooks exact;
    exact.gradient = exact_hook(space);
    train(target, exact_q, data, c, exact);
    CHECK(std::abs(exact_q.phi() - phi_star) <= 0.05);

    PoissonProposal q(std::log(4.0));
    const TrainResult r = train(target, q, data, c);
    CHECK(std::abs(q.phi() - phi_star) <= 0.05);
    CHECK(std::abs(q.phi() - exact_q.phi()) <= 0.05);

    const auto& recs = r.metrics.records();
    const std::size_t decile = recs.size() / 10;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < decile; ++i) {
        first += recs[i].accept_rate;
        last += recs[recs.size() - decile + i].accept_rate;
    }
    CHECK(first < last);
}

TEST_CASE("budget exhaustion carries epoch and datapoint context") {
    TruncatedPoissonTarget target(10.0, 5);
    PoissonProposal q(std::log(1.0));
    const std::vector<Observation> data = {Observation{}};
    TrainConfig c;
    c.batch_size = 1;
    c.fixed_threshold = -60.0;
    c.max_attempts = 3;
    try {
        train(target, q, data, c);
        FAIL("expected BudgetExhausted");
    } catch (const BudgetExhausted& e) {
        CHECK(e.attempts() == 3);
        CHECK(std::string(e.what()).find("epoch 0, datapoint 0") != std::string::npos);
    }
}

TEST_CASE("non-finite gradients abort with diagnostics") {
    test::TinySbn f(SbnShape{3, {2}}, 1, 0.5);
    const std::vector<Observation> data = {f.x};
    TrainConfig c;
    c.batch_size = 1;
    TrainHooks hooks;
    hooks.gradient = [](const ResampledProposal&, ObsView, Rng&, std::size_t, double, ParamVector& d_theta,
                        ParamVector&) {
        d_theta[0] = std::nan("");
        return EstimateStats{1, 1, 0.0};
    };
    try {
        train(f.model, f.q, data, c, hooks);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epoch 0, step 0") != std::string::npos);
        CHECK(msg.find("|d_theta|=nan") != std::string::npos);
    }
}

TEST_CASE("IS bound with one sample is the single-draw ELBO integrand") {
    test::TinySbn f(SbnShape{4, {3}}, 3, 1.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng a(s), b(s);
        const double got = eval_is_bound(f.model, f.q, f.x, 1, a);
        const Latent z = f.q.sample(f.x, b);
        CHECK(got == f.model.log_joint(f.x, z) - f.q.log_prob(f.x, z));
    }
    Rng rng(0);
    CHECK_THROWS_AS(eval_is_bound(f.model, f.q, f.x, 0, rng), PreconditionError);
}

TEST_CASE("IS bound with the posterior as proposal recovers the log evidence") {
    const GridTarget target = make_grid_fixture();
    const auto values = target.params().values();
    CategoricalProposal posterior(std::vector<double>(values.begin(), values.end()));
    const auto space = oracle::EnumerableSpace::categorical(target.cells());
    const double log_z = oracle::exact_log_evidence(target, {}, space);
    Rng rng(4);
    CHECK(std::abs(eval_is_bound(target, posterior, {}, 100000, rng) - log_z) <= 0.01);
}

TEST_CASE("IS bound with 25 samples sits between the ELBO and the log evidence") {
    test::TinySbn f(SbnShape{5, {4}}, 31, 1.0);
    const double elbo = oracle::exact_elbo(f.q, f.model, f.x, f.space);
    const double log_z = oracle::exact_log_evidence(f.model, f.x, f.space);
    REQUIRE(elbo < log_z);
    const MeanSe m = replicate(100, [&](std::size_t s) {
        Rng rng = derive_stream(s, {25});
        return eval_is_bound(f.model, f.q, f.x, 25, rng);
    });
    CHECK(m.mean >= elbo - 0.05);
    CHECK(m.mean <= log_z + 0.05);
}

TEST_CASE("RS bound at infinite threshold matches the single-sample ELBO") {
    test::TinySbn f(SbnShape{5, {4}}, 37, 1.0);
    ResampledProposal rp(f.q, f.model, kInf);
    const MeanSe rs = replicate(20000, [&](std::size_t s) {
        Rng rng = derive_stream(s, {1});
        return eval_rs_bound(rp, f.x, 1, 1, rng);
    });
    const MeanSe is1 = replicate(20000, [&](std::size_t s) {
        Rng rng = derive_stream(s, {2});
        return eval_is_bound(f.model, f.q, f.x, 1, rng);
    });
    const double elbo = oracle::exact_elbo(f.q, f.model, f.x, f.space);
    CHECK(std::abs(rs.mean - is1.mean) <= 3.0 * std::hypot(rs.se, is1.se));
    CHECK(std::abs(rs.mean - elbo) <= 3.0 * rs.se);
}

TEST_CASE("RS bound is unbiased for the exact R-ELBO up to the log Z_R estimate") {
    test::TinySbn f(SbnShape{4, {3, 2}}, 41, 1.5);
    const ResampledProposal unfiltered(f.q, f.model, kInf);
    const double T = oracle::exact_log_ratio_quantile(f.q, f.model, f.x, f.space, 0.5);
    ResampledProposal rp(f.q, f.model, T);
    const double want = oracle::exact_relbo(rp, f.x, f.space);
    const MeanSe m = replicate(10000, [&](std::size_t s) {
        Rng rng = derive_stream(s, {3});
        return eval_rs_bound(rp, f.x, 1, 500, rng);
    });
    CHECK(std::abs(m.mean - want) <= 3.0 * m.se);
    CHECK(want > oracle::exact_relbo(unfiltered, f.x, f.space));
    Rng rng(0);
    CHECK_THROWS_AS(eval_rs_bound(rp, f.x, 0, 1, rng), PreconditionError);
    CHECK_THROWS_AS(eval_rs_bound(rp, f.x, 1, 0, rng), PreconditionError);
}

TEST_CASE("RS bound on the grid tightens as the threshold decreases") {
    const GridTarget target = make_grid_fixture();
    CategoricalProposal q(target.cells());
    const auto space = oracle::EnumerableSpace::categorical(target.cells());
    const double log_z = oracle::exact_log_evidence(target, {}, space);
    double prev_mean = -kInf;
    double prev_exact = -kInf;
    for (double T : {kInf, 10.0, 5.0, 0.0}) {
        ResampledProposal rp(q, target, T);
        const double exact = oracle::exact_relbo(rp, {}, space);
        const MeanSe m = replicate(2000, [&](std::size_t s) {
            Rng rng = derive_stream(s, {4});
            return eval_rs_bound(rp, {}, 5, 2000, rng);
        });
        CHECK(exact > prev_exact);
        CHECK(exact <= log_z);
        CHECK(m.mean > prev_mean);
        CHECK(std::abs(m.mean - exact) <= 3.0 * m.se + 1e-3);
        prev_mean = m.mean;
        prev_exact = exact;
    }
}

TEST_CASE("exact bound ordering ELBO <= R-ELBO <= log evidence") {
    test::TinySbn f(SbnShape{4, {3, 2}}, 43, 1.5);
    const GridTarget grid = make_grid_fixture();
    CategoricalProposal uniform(grid.cells());
    const auto grid_space = oracle::EnumerableSpace::categorical(grid.cells());
    for (double T : {10.0, 0.0, -5.0}) {
        const double sbn_relbo = oracle::exact_relbo(ResampledProposal(f.q, f.model, T), f.x, f.space);
        CHECK(oracle::exact_elbo(f.q, f.model, f.x, f.space) <= sbn_relbo);
        CHECK(sbn_relbo <= oracle::exact_log_evidence(f.model, f.x, f.space));
        const double grid_relbo = oracle::exact_relbo(ResampledProposal(uniform, grid, T), {}, grid_space);
        CHECK(oracle::exact_elbo(uniform, grid, {}, grid_space) <= grid_relbo);
        CHECK(grid_relbo <= oracle::exact_log_evidence(grid, {}, grid_space));
    }
}

TEST_CASE("checkpoints round trip and reject corrupt input") {
    const SbnShape shape{5, {3}};
    SbnGenerative model(shape);
    SbnRecognition q(shape);
    Rng rng(2);
    model.randomize(rng, 0.5);
    q.randomize(rng, 0.5);

    ParamVector theta = model.params();
    Optimizer theta_opt(OptimizerSpec{}, theta.layout());
    theta_opt.step(theta, test::random_like(theta, rng, 1.0));
    ParamVector phi = q.params();
    Optimizer phi_opt(OptimizerSpec{}, phi.layout());

    Checkpoint ck;
    ck.architecture = {5, 3};
    ck.epoch = 2;
    ck.step = 40;
    ck.theta = make_block(theta, theta_opt);
    ck.phi = make_block(phi, phi_opt);
    ck.gamma = 0.9;
    ck.refresh_period = 20;
    ck.quantile_samples = 100;
    ck.thresholds = {kInf, 1.5, -2.0};

    std::stringstream buf;
    write_checkpoint(buf, ck);
    const std::string bytes = buf.str();
    std::istringstream in(bytes);
    const Checkpoint back = read_checkpoint(in);
    CHECK(back.architecture == ck.architecture);
    CHECK(back.epoch == 2);
    CHECK(back.step == 40);
    CHECK(back.optimizer_kind == OptimizerKind::adam);
    CHECK(back.theta.optimizer_steps == 1);
    CHECK(back.thresholds == ck.thresholds);
    CHECK(back.gamma == 0.9);
    check_identical(restore_params(back.theta, theta.layout()), theta);
    check_identical(restore_first_moment(back.theta, theta.layout()), theta_opt.first_moment());
    check_identical(restore_second_moment(back.theta, theta.layout()), theta_opt.second_moment());
    CHECK_THROWS_AS(restore_params(back.theta, phi.layout()), ShapeError);

    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream bad_in(bad);
    try {
        read_checkpoint(bad_in);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.offset() == 0);
    }
    std::istringstream short_in(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(read_checkpoint(short_in), FormatError);
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/checkpoint.bin"), ConfigError);
}

TEST_CASE("resuming from an epoch boundary reproduces the uninterrupted run") {
    const SbnShape shape{6, {4}};
    auto fresh = [&](SbnGenerative& model, SbnRecognition& q) {
        Rng init(8);
        model.randomize(init, 0.3);
        q.randomize(init, 0.3);
    };
    SbnGenerative gen_model(shape);
    Rng data_rng(3);
    gen_model.randomize(data_rng, 1.0);
    const auto data = tiny_dataset(gen_model, 16, 4);
    TrainConfig c = tiny_config();
    c.epochs = 3;
    c.refresh_steps = 0;

    SbnGenerative full_model(shape);
    SbnRecognition full_q(shape);
    fresh(full_model, full_q);
    const TrainResult full = train(full_model, full_q, data, c);

    SbnGenerative part_model(shape);
    SbnRecognition part_q(shape);
    fresh(part_model, part_q);
    TrainConfig first = c;
    first.epochs = 1;
    std::optional<Checkpoint> saved;
    TrainHooks hooks;
    hooks.on_epoch_end = [&](const TrainSnapshot& s) {
        Checkpoint ck;
        ck.epoch = s.epoch;
        ck.step = s.step;
        ck.theta = make_block(s.model.params(), s.theta_optimizer);
        ck.phi = make_block(s.proposal.params(), s.phi_optimizer);
        ck.thresholds.assign(s.thresholds.values().begin(), s.thresholds.values().end());
        std::stringstream buf;
        write_checkpoint(buf, ck);
        saved = read_checkpoint(buf);
    };
    train(part_model, part_q, data, first, hooks);
    REQUIRE(saved);

    SbnGenerative resumed_model(shape);
    SbnRecognition resumed_q(shape);
    const auto theta_layout = resumed_model.params().layout();
    const auto phi_layout = resumed_q.params().layout();
    resumed_model.set_params(restore_params(saved->theta, theta_layout));
    resumed_q.set_params(restore_params(saved->phi, phi_layout));
    ResumeState state;
    state.epoch = saved->epoch;
    state.step = saved->step;
    state.thresholds = saved->thresholds;
    state.theta_steps = saved->theta.optimizer_steps;
    state.theta_first = restore_first_moment(saved->theta, theta_layout);
    state.theta_second = restore_second_moment(saved->theta, theta_layout);
    state.phi_steps = saved->phi.optimizer_steps;
    state.phi_first = restore_first_moment(saved->phi, phi_layout);
    state.phi_second = restore_second_moment(saved->phi, phi_layout);
    const TrainResult resumed = train(resumed_model, resumed_q, data, c, {}, &state);

    check_identical(resumed.theta, full.theta);
    check_identical(resumed.phi, full.phi);
    const auto& tail = full.metrics.records();
    const std::vector<StepRecord> full_tail(tail.begin() + static_cast<long>(saved->step), tail.end());
    check_identical(resumed.metrics.records(), full_tail);
}
