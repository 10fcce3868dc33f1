#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "vrs/bernoulli_layer.hpp"
#include "vrs/errors.hpp"
#include "vrs/grid.hpp"
#include "vrs/numerics.hpp"
#include "vrs/oracle.hpp"
#include "vrs/poisson.hpp"
#include "vrs/sbn.hpp"

using namespace vrs;
using vrs::oracle::EnumerableSpace;

namespace {

// Sum over an enumerable space of p(z) grad log p(z) for a normalized q.
ParamVector expected_score(const Proposal& q, ObsView x, const EnumerableSpace& space) {
    ParamVector acc(q.params().layout());
    for (const auto& z : space.states()) q.accumulate_grad_log_prob(x, z, std::exp(q.log_prob(x, z)), acc);
    return acc;
}

double max_abs(const ParamVector& v) {
    double m = 0.0;
    for (double x : v.values()) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("all-zero SBN assigns -d log 2 to every configuration") {
    const SbnShape shape{4, {3, 2}};
    const SbnGenerative model(shape);
    const SbnRecognition q(shape);
    const Observation x{1, 0, 1, 1};
    const double d_joint = static_cast<double>(shape.visible + shape.latent_dim());
    const auto space = EnumerableSpace::binary(shape.latent_dim());
    for (const auto& z : space.states()) {
        CHECK(model.log_joint(x, z) == doctest::Approx(-d_joint * std::log(2.0)).epsilon(1e-14));
        CHECK(q.log_prob(x, z) == doctest::Approx(-5.0 * std::log(2.0)).epsilon(1e-14));
    }
}

TEST_CASE("single Bernoulli unit at zero logit has bias score one half") {
    const std::vector<double> bias{0.0};
    const BernoulliLayer layer({}, bias, 0);
    std::vector<double> gw, gb(1, 0.0);
    const std::vector<int> one{1};
    layer.accumulate_grad({}, one, 1.0, gw, gb);
    CHECK(gb[0] == 0.5);
}

TEST_CASE("SBN log joint decomposes into layer log-probs") {
    test::TinySbn t({3, {2, 2}}, 11, 1.0);
    const Latent z{1, 0, 0, 1};
    // hidden[0] = z[0..2) feeds x; hidden[1] = z[2..4) is the top layer.
    const auto& p = t.model.params();
    const BernoulliLayer prior({}, p.segment("prior.bias"), 0);
    const BernoulliLayer top(p.segment("gen1.weights"), p.segment("gen1.bias"), 2);
    const BernoulliLayer out(p.segment("gen2.weights"), p.segment("gen2.bias"), 2);
    const std::vector<int> h0{z[0], z[1]}, h1{z[2], z[3]};
    const std::vector<int> xi(t.x.begin(), t.x.end());
    const double want = prior.log_prob({}, h1) + top.log_prob(to_real(h1), h0) + out.log_prob(to_real(h0), xi);
    CHECK(t.model.log_joint(t.x, z) == doctest::Approx(want).epsilon(1e-14));

    const auto& r = t.q.params();
    const BernoulliLayer r1(r.segment("rec1.weights"), r.segment("rec1.bias"), 3);
    const BernoulliLayer r2(r.segment("rec2.weights"), r.segment("rec2.bias"), 2);
    std::vector<double> xr(t.x.begin(), t.x.end());
    const double want_q = r1.log_prob(xr, h0) + r2.log_prob(to_real(h0), h1);
    CHECK(t.q.log_prob(t.x, z) == doctest::Approx(want_q).epsilon(1e-14));
}

TEST_CASE("SBN densities normalize and scores vanish in expectation") {
    test::TinySbn t({3, {2, 2}}, 12, 1.5);
    const auto space = EnumerableSpace::binary(t.shape.latent_dim());
    double mass_q = 0.0;
    for (const auto& z : space.states()) mass_q += std::exp(t.q.log_prob(t.x, z));
    CHECK(mass_q == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(max_abs(expected_score(t.q, t.x, space)) < 1e-10);

    // The generative model is normalized over (x, z) jointly.
    const auto joint = EnumerableSpace::binary(t.shape.visible + t.shape.latent_dim());
    double mass_p = 0.0;
    ParamVector score(t.model.params().layout());
    for (const auto& xz : joint.states()) {
        const Observation x(xz.begin(), xz.begin() + 3);
        const Latent z(xz.begin() + 3, xz.end());
        const double w = std::exp(t.model.log_joint(x, z));
        mass_p += w;
        t.model.accumulate_grad_log_joint(x, z, w, score);
    }
    CHECK(mass_p == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(max_abs(score) < 1e-10);
}

TEST_CASE("three-unit SBN prior score has zero expectation") {
    const SbnShape shape{1, {3}};
    SbnGenerative model(shape);
    Rng rng(3);
    model.set_params(test::random_like(model.params(), rng, 1.0));
    const auto space = EnumerableSpace::binary(4);
    ParamVector score(model.params().layout());
    for (const auto& s : space.states()) {
        const Observation x{static_cast<std::uint8_t>(s[0])};
        const Latent z(s.begin() + 1, s.end());
        model.accumulate_grad_log_joint(x, z, std::exp(model.log_joint(x, z)), score);
    }
    CHECK(max_abs(score) < 1e-10);
}

TEST_CASE("SBN gradients match central finite differences") {
    for (std::uint64_t seed : {21, 22, 23}) {
        test::TinySbn t({4, {3, 2}}, seed, 1.0);
        Rng rng(seed);
        const Latent z = t.q.sample(t.x, rng);

        SbnGenerative probe_p(t.shape);
        const auto fd_p = oracle::fd_grad(
            [&](const ParamVector& th) {
                probe_p.set_params(th);
                return probe_p.log_joint(t.x, z);
            },
            t.model.params(), 1e-4);
        CHECK(test::max_rel_err(t.model.grad_log_joint(t.x, z), fd_p, 1e-3) < 1e-5);

        SbnRecognition probe_q(t.shape);
        const auto fd_q = oracle::fd_grad(
            [&](const ParamVector& ph) {
                probe_q.set_params(ph);
                return probe_q.log_prob(t.x, z);
            },
            t.q.params(), 1e-4);
        CHECK(test::max_rel_err(t.q.grad_log_prob(t.x, z), fd_q, 1e-3) < 1e-5);
    }
}

TEST_CASE("SBN inputs are validated") {
    const SbnShape shape{3, {2}};
    const SbnGenerative model(shape);
    CHECK_THROWS_AS(model.log_joint(Observation{1, 0}, Latent{0, 1}), ShapeError);
    CHECK_THROWS_AS(model.log_joint(Observation{1, 0, 1}, Latent{0}), ShapeError);
    CHECK_THROWS_AS(model.log_joint(Observation{1, 2, 1}, Latent{0, 1}), DomainError);
    CHECK_THROWS_AS(model.log_joint(Observation{1, 0, 1}, Latent{0, -1}), DomainError);
    SbnGenerative m2(shape);
    CHECK_THROWS_AS(m2.set_params(SbnRecognition(shape).params()), ShapeError);
}

TEST_CASE("zero-parameter recognition net samples fair bits") {
    const SbnShape shape{6, {4}};
    const SbnRecognition q(shape);
    const Observation x{1, 1, 0, 0, 1, 0};
    Rng rng(5);
    std::vector<double> ones(4, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto z = q.sample(x, rng);
        for (std::size_t j = 0; j < 4; ++j) ones[j] += z[j];
    }
    for (double c : ones) CHECK(std::abs(c / n - 0.5) <= 0.01);

    Rng a(9), b(9);
    for (int i = 0; i < 20; ++i) CHECK(q.sample(x, a) == q.sample(x, b));
}

TEST_CASE("SBN randomize draws small weights and zero biases") {
    const SbnShape shape{5, {4}};
    SbnGenerative model(shape);
    Rng rng(1);
    model.randomize(rng, 0.05);
    for (double w : model.params().segment("gen1.weights")) CHECK(std::abs(w) <= 0.05);
    for (double b : model.params().segment("gen1.bias")) CHECK(b == 0.0);
    for (double b : model.params().segment("prior.bias")) CHECK(b == 0.0);
}

TEST_CASE("grid target is symmetric under uniform weights") {
    const GridTarget g(5, std::vector<double>(25, -1.5));
    for (int c = 0; c < 25; ++c) CHECK(g.log_joint({}, Latent{c}) == -1.5);
    CHECK_THROWS_AS(g.log_joint({}, Latent{25}), DomainError);
    CHECK_THROWS_AS(GridTarget(2, std::vector<double>(4, -kInf)), DomainError);
    CHECK_THROWS_AS(GridTarget(2, std::vector<double>(3, 0.0)), ShapeError);
}

TEST_CASE("grid target gradient is a one-hot") {
    const GridTarget g = make_grid_fixture();
    const auto grad = g.grad_log_joint({}, Latent{7});
    for (std::size_t i = 0; i < grad.size(); ++i) CHECK(grad[i] == (i == 7 ? 1.0 : 0.0));
}

TEST_CASE("categorical proposal normalizes with zero-mean score") {
    Rng rng(4);
    CategoricalProposal q(6);
    q.set_params(test::random_like(q.params(), rng, 2.0));
    const auto space = EnumerableSpace::categorical(6);
    double mass = 0.0;
    for (const auto& z : space.states()) mass += std::exp(q.log_prob({}, z));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs(expected_score(q, {}, space)) < 1e-12);

    CategoricalProposal probe(6);
    const Latent z{2};
    const auto fd = oracle::fd_grad(
        [&](const ParamVector& p) {
            probe.set_params(p);
            return probe.log_prob({}, z);
        },
        q.params(), 1e-5);
    CHECK(test::max_rel_err(q.grad_log_prob({}, z), fd, 1e-3) < 1e-6);
}

TEST_CASE("truncated Poisson target masses") {
    const TruncatedPoissonTarget p(10.0, 5, 1e-30);
    CHECK(p.log_joint({}, Latent{3}) == doctest::Approx(std::log(1e-30)).epsilon(1e-15));
    const double want12 = 12.0 * std::log(10.0) - 10.0 - std::lgamma(13.0);
    CHECK(p.log_joint({}, Latent{12}) == doctest::Approx(want12).epsilon(1e-14));
    CHECK(p.log_joint({}, Latent{5}) == doctest::Approx(poisson_log_pmf(5, 10.0)).epsilon(1e-15));
    CHECK(TruncatedPoissonTarget(10.0, 5, 0.0).log_joint({}, Latent{0}) == -kInf);
    CHECK_THROWS_AS(p.log_joint({}, Latent{-1}), DomainError);
    CHECK(p.params().empty());
}

TEST_CASE("Poisson proposal score, normalization and sampling") {
    const PoissonProposal q(std::log(10.0));
    CHECK(std::abs(q.grad_log_prob({}, Latent{10})[0]) < 1e-12);
    CHECK(q.grad_log_prob({}, Latent{3})[0] == doctest::Approx(3.0 - 10.0));

    const auto space = EnumerableSpace::integers(200);
    CHECK(max_abs(expected_score(q, {}, space)) < 1e-10);
    double mass = 0.0;
    for (const auto& z : space.states()) mass += std::exp(q.log_prob({}, z));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

    PoissonProposal probe(0.0);
    for (int z : {0, 4, 17}) {
        const auto fd = oracle::fd_grad(
            [&](const ParamVector& p) {
                probe.set_params(p);
                return probe.log_prob({}, Latent{z});
            },
            q.params(), 1e-4);
        CHECK(test::rel_err(q.grad_log_prob({}, Latent{z})[0], fd[0], 1e-3) < 1e-5);
    }

    Rng rng(17);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += q.sample({}, rng)[0];
    const double mean = sum / n;
    CHECK(mean >= 9.85);
    CHECK(mean <= 10.15);
}
