#include "vrs/sbn.hpp"

#include <numeric>
#include <string>

#include "vrs/errors.hpp"

namespace vrs {

namespace {

constexpr std::size_t kVisible = static_cast<std::size_t>(-1);

void check_shape(const SbnShape& s) {
    if (s.visible == 0 || s.hidden.empty()) throw ShapeError("SBN needs a visible layer and at least one hidden layer");
    for (auto h : s.hidden) {
        if (h == 0) throw ShapeError("SBN hidden layer of width 0");
    }
}

void check_binary(ObsView x, std::size_t n, const char* what) {
    if (x.size() != n) {
        throw ShapeError(std::string(what) + ": expected " + std::to_string(n) + " units, got " +
                         std::to_string(x.size()));
    }
    for (auto v : x) {
        if (v > 1) throw DomainError(std::string(what) + ": non-binary entry");
    }
}

void check_binary(LatentView z, std::size_t n, const char* what) {
    if (z.size() != n) {
        throw ShapeError(std::string(what) + ": expected " + std::to_string(n) + " units, got " +
                         std::to_string(z.size()));
    }
    for (auto v : z) {
        if (v != 0 && v != 1) throw DomainError(std::string(what) + ": non-binary entry");
    }
}

std::vector<double> obs_to_real(ObsView x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
    return out;
}

// Offsets of each hidden layer inside the concatenated latent vector.
std::vector<std::size_t> hidden_offsets(const SbnShape& s) {
    std::vector<std::size_t> off(s.hidden.size());
    std::exclusive_scan(s.hidden.begin(), s.hidden.end(), off.begin(), std::size_t{0});
    return off;
}

void randomize_weights(ParamVector& p, Rng& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    for (const auto& seg : p.layout()->segments()) {
        auto v = p.segment(seg.name);
        const bool is_weight = seg.name.ends_with(".weights");
        for (double& w : v) w = is_weight ? u(rng) : 0.0;
    }
}

}  // namespace

std::size_t SbnShape::latent_dim() const { return std::accumulate(hidden.begin(), hidden.end(), std::size_t{0}); }

// ---------------------------------------------------------------------------
// Generative

SbnGenerative::SbnGenerative(SbnShape shape) : shape_(std::move(shape)) {
    check_shape(shape_);
    const std::size_t L = shape_.hidden.size();
    ParamLayout::Builder b;
    b.add("prior.bias", shape_.hidden[L - 1]);
    // Layer k = 1 maps the top hidden layer downward; the last one emits x.
    for (std::size_t k = 1; k <= L; ++k) {
        const std::size_t parent = shape_.hidden[L - k];
        const std::size_t child = (k == L) ? shape_.visible : shape_.hidden[L - k - 1];
        b.add("gen" + std::to_string(k) + ".weights", child, parent);
        b.add("gen" + std::to_string(k) + ".bias", child);
    }
    params_ = ParamVector(b.build());
}

void SbnGenerative::set_params(const ParamVector& params) {
    params_.require_same_layout(params, "SbnGenerative::set_params");
    params_ = ParamVector(params_.layout(), std::vector<double>(params.values().begin(), params.values().end()));
}

void SbnGenerative::randomize(Rng& rng, double scale) { randomize_weights(params_, rng, scale); }

std::vector<SbnGenerative::Edge> SbnGenerative::edges() const {
    const std::size_t L = shape_.hidden.size();
    const auto off = hidden_offsets(shape_);
    std::vector<Edge> out;
    out.reserve(L + 1);
    out.push_back(Edge{BernoulliLayer({}, params_.segment("prior.bias"), 0), 0, off[L - 1]});
    for (std::size_t k = 1; k <= L; ++k) {
        const std::size_t parent_idx = L - k;
        const std::size_t parent = shape_.hidden[parent_idx];
        const auto name = "gen" + std::to_string(k);
        out.push_back(Edge{BernoulliLayer(params_.segment(name + ".weights"), params_.segment(name + ".bias"), parent),
                           off[parent_idx], k == L ? kVisible : off[parent_idx - 1]});
    }
    return out;
}

double SbnGenerative::log_joint(ObsView x, LatentView z) const {
    check_binary(x, shape_.visible, "SBN observation");
    check_binary(z, shape_.latent_dim(), "SBN latent");
    const auto zr = to_real(z);
    double total = 0.0;
    for (const auto& e : edges()) {
        const auto input = std::span<const double>(zr).subspan(e.parent_offset, e.layer.in_dim());
        if (e.child_offset == kVisible) {
            std::vector<int> xi(x.begin(), x.end());
            total += e.layer.log_prob(input, xi);
        } else {
            total += e.layer.log_prob(input, z.subspan(e.child_offset, e.layer.out_dim()));
        }
    }
    return total;
}

void SbnGenerative::accumulate_grad_log_joint(ObsView x, LatentView z, double scale, ParamVector& out) const {
    check_binary(x, shape_.visible, "SBN observation");
    check_binary(z, shape_.latent_dim(), "SBN latent");
    params_.require_same_layout(out, "SbnGenerative gradient");
    const auto zr = to_real(z);
    const auto es = edges();
    for (std::size_t i = 0; i < es.size(); ++i) {
        const auto& e = es[i];
        const auto input = std::span<const double>(zr).subspan(e.parent_offset, e.layer.in_dim());
        std::span<double> gw;
        std::span<double> gb;
        if (i == 0) {
            gb = out.segment("prior.bias");
        } else {
            const auto name = "gen" + std::to_string(i);
            gw = out.segment(name + ".weights");
            gb = out.segment(name + ".bias");
        }
        if (e.child_offset == kVisible) {
            std::vector<int> xi(x.begin(), x.end());
            e.layer.accumulate_grad(input, xi, scale, gw, gb);
        } else {
            e.layer.accumulate_grad(input, z.subspan(e.child_offset, e.layer.out_dim()), scale, gw, gb);
        }
    }
}

std::pair<Observation, Latent> SbnGenerative::sample_joint(Rng& rng) const {
    Latent z(shape_.latent_dim());
    std::vector<int> x(shape_.visible);
    std::vector<double> zr(z.size(), 0.0);
    for (const auto& e : edges()) {
        const auto input = std::span<const double>(zr).subspan(e.parent_offset, e.layer.in_dim());
        if (e.child_offset == kVisible) {
            e.layer.sample(input, rng, x);
        } else {
            auto child = std::span<int>(z).subspan(e.child_offset, e.layer.out_dim());
            e.layer.sample(input, rng, child);
            for (std::size_t j = 0; j < child.size(); ++j) zr[e.child_offset + j] = child[j];
        }
    }
    return {Observation(x.begin(), x.end()), z};
}

// ---------------------------------------------------------------------------
// Recognition

SbnRecognition::SbnRecognition(SbnShape shape) : shape_(std::move(shape)) {
    check_shape(shape_);
    ParamLayout::Builder b;
    for (std::size_t k = 1; k <= shape_.hidden.size(); ++k) {
        const std::size_t in = (k == 1) ? shape_.visible : shape_.hidden[k - 2];
        b.add("rec" + std::to_string(k) + ".weights", shape_.hidden[k - 1], in);
        b.add("rec" + std::to_string(k) + ".bias", shape_.hidden[k - 1]);
    }
    params_ = ParamVector(b.build());
}

void SbnRecognition::set_params(const ParamVector& params) {
    params_.require_same_layout(params, "SbnRecognition::set_params");
    params_ = ParamVector(params_.layout(), std::vector<double>(params.values().begin(), params.values().end()));
}

void SbnRecognition::randomize(Rng& rng, double scale) { randomize_weights(params_, rng, scale); }

BernoulliLayer SbnRecognition::layer(std::size_t k) const {
    const auto name = "rec" + std::to_string(k);
    const std::size_t in = (k == 1) ? shape_.visible : shape_.hidden[k - 2];
    return BernoulliLayer(params_.segment(name + ".weights"), params_.segment(name + ".bias"), in);
}

Latent SbnRecognition::sample(ObsView x, Rng& rng) const {
    check_binary(x, shape_.visible, "SBN observation");
    Latent z(shape_.latent_dim());
    std::vector<double> input = obs_to_real(x);
    std::size_t off = 0;
    for (std::size_t k = 1; k <= shape_.hidden.size(); ++k) {
        auto child = std::span<int>(z).subspan(off, shape_.hidden[k - 1]);
        layer(k).sample(input, rng, child);
        input = to_real(child);
        off += child.size();
    }
    return z;
}

double SbnRecognition::log_prob(ObsView x, LatentView z) const {
    check_binary(x, shape_.visible, "SBN observation");
    check_binary(z, shape_.latent_dim(), "SBN latent");
    const auto zr = to_real(z);
    const auto xr = obs_to_real(x);
    double total = 0.0;
    std::size_t off = 0;
    std::span<const double> input = xr;
    for (std::size_t k = 1; k <= shape_.hidden.size(); ++k) {
        const std::size_t w = shape_.hidden[k - 1];
        total += layer(k).log_prob(input, z.subspan(off, w));
        input = std::span<const double>(zr).subspan(off, w);
        off += w;
    }
    return total;
}

void SbnRecognition::accumulate_grad_log_prob(ObsView x, LatentView z, double scale, ParamVector& out) const {
    check_binary(x, shape_.visible, "SBN observation");
    check_binary(z, shape_.latent_dim(), "SBN latent");
    params_.require_same_layout(out, "SbnRecognition gradient");
    const auto zr = to_real(z);
    const auto xr = obs_to_real(x);
    std::size_t off = 0;
    std::span<const double> input = xr;
    for (std::size_t k = 1; k <= shape_.hidden.size(); ++k) {
        const std::size_t w = shape_.hidden[k - 1];
        const auto name = "rec" + std::to_string(k);
        layer(k).accumulate_grad(input, z.subspan(off, w), scale, out.segment(name + ".weights"),
                                 out.segment(name + ".bias"));
        input = std::span<const double>(zr).subspan(off, w);
        off += w;
    }
}

}  // namespace vrs
