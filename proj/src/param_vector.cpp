#include "vrs/param_vector.hpp"

#include <cmath>

#include "vrs/errors.hpp"
#include "vrs/simd.hpp"

namespace vrs {

ParamLayout::Builder& ParamLayout::Builder::add(std::string name, std::size_t rows, std::size_t cols) {
    for (const auto& s : segments_) {
        if (s.name == name) throw PreconditionError("duplicate parameter segment '" + name + "'");
    }
    segments_.push_back(Segment{std::move(name), total_, rows, cols});
    total_ += rows * cols;
    return *this;
}

std::shared_ptr<const ParamLayout> ParamLayout::Builder::build() {
    auto layout = std::make_shared<ParamLayout>();
    layout->segments_ = std::move(segments_);
    layout->total_ = total_;
    segments_.clear();
    total_ = 0;
    return layout;
}

const Segment& ParamLayout::segment(const std::string& name) const {
    for (const auto& s : segments_) {
        if (s.name == name) return s;
    }
    throw ShapeError("no parameter segment named '" + name + "'");
}

std::uint64_t ParamLayout::hash() const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t byte) {
        h ^= byte;
        h *= 1099511628211ull;
    };
    for (const auto& s : segments_) {
        for (unsigned char c : s.name) mix(c);
        mix(0);
        for (std::uint64_t v : {static_cast<std::uint64_t>(s.rows), static_cast<std::uint64_t>(s.cols)}) {
            for (int i = 0; i < 8; ++i) mix((v >> (8 * i)) & 0xff);
        }
    }
    return h;
}

bool ParamLayout::operator==(const ParamLayout& other) const {
    if (segments_.size() != other.segments_.size()) return false;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& a = segments_[i];
        const auto& b = other.segments_[i];
        if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
    }
    return true;
}

ParamVector::ParamVector() : layout_(ParamLayout::Builder().build()) {}

ParamVector::ParamVector(LayoutPtr layout) : layout_(std::move(layout)), values_(layout_->size(), 0.0) {}

ParamVector::ParamVector(LayoutPtr layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
    if (values_.size() != layout_->size()) {
        throw ShapeError("parameter vector has " + std::to_string(values_.size()) + " values, layout expects " +
                         std::to_string(layout_->size()));
    }
}

std::span<double> ParamVector::segment(const std::string& name) {
    const auto& s = layout_->segment(name);
    return std::span<double>(values_).subspan(s.offset, s.size());
}

std::span<const double> ParamVector::segment(const std::string& name) const {
    const auto& s = layout_->segment(name);
    return std::span<const double>(values_).subspan(s.offset, s.size());
}

bool ParamVector::same_layout(const ParamVector& other) const {
    return layout_ == other.layout_ || *layout_ == *other.layout_;
}

void ParamVector::require_same_layout(const ParamVector& other, const char* what) const {
    if (!same_layout(other)) throw ShapeError(std::string(what) + ": parameter layouts differ");
}

void ParamVector::add_scaled(double alpha, const ParamVector& other) {
    require_same_layout(other, "add_scaled");
    simd::axpy(alpha, other.values_, values_);
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
    add_scaled(1.0, other);
    return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
    add_scaled(-1.0, other);
    return *this;
}

ParamVector& ParamVector::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

void ParamVector::fill(double v) {
    for (double& x : values_) x = v;
}

double ParamVector::norm() const { return std::sqrt(simd::dot(values_, values_)); }

bool ParamVector::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
ParamVector operator*(double s, ParamVector a) { return a *= s; }

}  // namespace vrs
