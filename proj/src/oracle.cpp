#include "vrs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vrs/errors.hpp"
#include "vrs/grad.hpp"
#include "vrs/numerics.hpp"

namespace vrs::oracle {

namespace {

void check_size(std::size_t n) {
    if (n > EnumerableSpace::kMaxStates) {
        throw OracleError("enumerable space of " + std::to_string(n) + " states exceeds the limit of " +
                          std::to_string(EnumerableSpace::kMaxStates));
    }
}

}  // namespace

EnumerableSpace EnumerableSpace::binary(std::size_t bits) {
    if (bits >= 63) throw OracleError("binary space too large");
    const std::size_t n = std::size_t{1} << bits;
    check_size(n);
    std::vector<Latent> states(n, Latent(bits));
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t b = 0; b < bits; ++b) states[s][b] = static_cast<int>((s >> (bits - 1 - b)) & 1u);
    }
    return EnumerableSpace(std::move(states));
}

EnumerableSpace EnumerableSpace::categorical(std::size_t k) {
    check_size(k);
    std::vector<Latent> states(k);
    for (std::size_t i = 0; i < k; ++i) states[i] = Latent{static_cast<int>(i)};
    return EnumerableSpace(std::move(states));
}

EnumerableSpace EnumerableSpace::integers(int max_inclusive) {
    if (max_inclusive < 0) throw OracleError("integer space needs a non-negative cap");
    return categorical(static_cast<std::size_t>(max_inclusive) + 1);
}

double Enumeration::r(std::size_t i) const { return std::exp(log_gamma_r[i] - log_ZR); }
double Enumeration::posterior(std::size_t i) const { return std::exp(log_p[i] - log_ZP); }

Enumeration enumerate(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    Enumeration e;
    e.threshold = rp.threshold();
    const std::size_t n = space.size();
    e.log_p.resize(n);
    e.log_q.resize(n);
    e.log_gamma_r.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& z = space.states()[i];
        e.log_p[i] = rp.model().log_joint(x, z);
        e.log_q[i] = rp.proposal().log_prob(x, z);
        e.log_gamma_r[i] = e.log_q[i] + log_accept_from_ratio(log_ratio_from(e.log_p[i], e.log_q[i], e.threshold));
    }
    e.log_ZR = log_sum_exp(e.log_gamma_r);
    e.log_ZP = log_sum_exp(e.log_p);
    return e;
}

double exact_log_ZR(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    return enumerate(rp, x, space).log_ZR;
}

double exact_ZR(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    return std::exp(exact_log_ZR(rp, x, space));
}

double exact_log_evidence(const LatentModel& model, ObsView x, const EnumerableSpace& space) {
    std::vector<double> lp(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) lp[i] = model.log_joint(x, space.states()[i]);
    return log_sum_exp(lp);
}

std::vector<double> exact_R(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    const auto e = enumerate(rp, x, space);
    std::vector<double> r(space.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = e.r(i);
    return r;
}

std::vector<double> exact_posterior(const LatentModel& model, ObsView x, const EnumerableSpace& space) {
    std::vector<double> lp(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) lp[i] = model.log_joint(x, space.states()[i]);
    const double z = log_sum_exp(lp);
    for (double& v : lp) v = std::exp(v - z);
    return lp;
}

double exact_kl_R_P(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    const auto e = enumerate(rp, x, space);
    double kl = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (e.log_gamma_r[i] == -kInf) continue;
        const double log_r = e.log_gamma_r[i] - e.log_ZR;
        kl += std::exp(log_r) * (log_r - (e.log_p[i] - e.log_ZP));
    }
    return kl;
}

double exact_kl_Q_P(const Proposal& q, const LatentModel& model, ObsView x, const EnumerableSpace& space) {
    return exact_kl_R_P(ResampledProposal(q, model, kInf), x, space);
}

double exact_relbo(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    const auto e = enumerate(rp, x, space);
    double expectation = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (e.log_gamma_r[i] == -kInf) continue;
        expectation += e.r(i) * (e.log_p[i] - e.log_gamma_r[i]);
    }
    return expectation + e.log_ZR;
}

double exact_elbo(const Proposal& q, const LatentModel& model, ObsView x, const EnumerableSpace& space) {
    double s = 0.0;
    for (const auto& z : space.states()) {
        const double lq = q.log_prob(x, z);
        if (lq == -kInf) continue;
        s += std::exp(lq) * (model.log_joint(x, z) - lq);
    }
    return s;
}

double exact_kl_from_centered_signal(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    const auto e = enumerate(rp, x, space);
    const std::size_t n = space.size();
    std::vector<double> signal(n, 0.0);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (e.log_gamma_r[i] == -kInf) continue;
        signal[i] = e.log_p[i] - e.log_gamma_r[i];
        mean += e.r(i) * signal[i];
    }
    // log sum_i r_i exp(A_i - mean)
    std::vector<double> terms;
    terms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (e.log_gamma_r[i] == -kInf) continue;
        terms.push_back(e.log_gamma_r[i] - e.log_ZR + (signal[i] - mean));
    }
    return log_sum_exp(terms);
}

double exact_kl_slope_in_threshold(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    const auto e = enumerate(rp, x, space);
    const double T = e.threshold;
    double mu = 0.0;
    double ms = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double l = log_ratio_from(e.log_p[i], e.log_q[i], T);
        mu += e.r(i) * (log_sigmoid(l) + T);
        ms += e.r(i) * sigmoid(l);
    }
    double cov = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double l = log_ratio_from(e.log_p[i], e.log_q[i], T);
        cov += e.r(i) * (log_sigmoid(l) + T - mu) * (sigmoid(l) - ms);
    }
    return cov;
}

ExactGradient exact_relbo_grad(const ResampledProposal& rp, ObsView x, const EnumerableSpace& space) {
    const auto e = enumerate(rp, x, space);
    const std::size_t n = space.size();
    std::vector<SignalPair> pairs;
    pairs.reserve(n);
    double mean_A = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pairs.push_back(signal_pair(rp, x, space.states()[i]));
        if (e.log_gamma_r[i] != -kInf) mean_A += e.r(i) * pairs.back().A;
    }
    ExactGradient g;
    g.d_theta = ParamVector(rp.model().params().layout());
    g.d_phi = ParamVector(rp.proposal().params().layout());
    for (std::size_t i = 0; i < n; ++i) {
        if (e.log_gamma_r[i] == -kInf) continue;
        const double r = e.r(i);
        const double centered = pairs[i].A - mean_A;
        g.d_phi.add_scaled(r * centered, pairs[i].B_phi);
        g.d_theta.add_scaled(r, pairs[i].B_theta_direct);
        g.d_theta.add_scaled(r * centered, pairs[i].B_theta_cov);
    }
    return g;
}

double exact_log_ratio_quantile(const Proposal& q, const LatentModel& model, ObsView x,
                                const EnumerableSpace& space, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("quantile gamma must lie in (0, 1]");
    std::vector<std::pair<double, double>> atoms;  // (value, mass)
    for (const auto& z : space.states()) {
        const double lq = q.log_prob(x, z);
        if (lq == -kInf) continue;
        atoms.emplace_back(lq - model.log_joint(x, z), std::exp(lq));
    }
    std::sort(atoms.begin(), atoms.end());
    double total = 0.0;
    for (const auto& a : atoms) total += a.second;
    double cdf = 0.0;
    for (const auto& a : atoms) {
        cdf += a.second / total;
        if (gamma <= cdf + 1e-15) return a.first;
    }
    return atoms.back().first;
}

RatioMass exact_ratio_mass(const Proposal& q, const LatentModel& model, ObsView x, const EnumerableSpace& space,
                           double threshold) {
    RatioMass m;
    double total = 0.0;
    for (const auto& z : space.states()) {
        const double lq = q.log_prob(x, z);
        if (lq == -kInf) continue;
        const double w = std::exp(lq);
        const double l = log_ratio_from(model.log_joint(x, z), lq, threshold);
        total += w;
        if (l < 0.0) m.below += w;
        if (l <= 0.0) m.at_or_below += w;
    }
    m.below /= total;
    m.at_or_below /= total;
    return m;
}

ParamVector fd_grad(const std::function<double(const ParamVector&)>& fn, const ParamVector& params, double step) {
    if (!(step > 0.0)) throw PreconditionError("fd_grad: step must be positive");
    ParamVector g = ParamVector::zeros_like(params);
    ParamVector probe = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double base = params[i];
        probe[i] = base + step;
        const double up = fn(probe);
        probe[i] = base - step;
        const double down = fn(probe);
        probe[i] = base;
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw OracleError("fd_grad: non-finite function value at coordinate " + std::to_string(i));
        }
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

}  // namespace vrs::oracle
