#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vrs {

struct Segment {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 1;

    std::size_t size() const noexcept { return rows * cols; }
};

// Named, immutable partition of a flat parameter array. Built once per model;
// parameter and gradient vectors of that model share the same instance.
class ParamLayout {
public:
    class Builder {
    public:
        Builder& add(std::string name, std::size_t rows, std::size_t cols = 1);
        std::shared_ptr<const ParamLayout> build();

    private:
        std::vector<Segment> segments_;
        std::size_t total_ = 0;
    };

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    std::size_t size() const noexcept { return total_; }
    const Segment& segment(const std::string& name) const;

    // FNV-1a over segment names and shapes; stored in checkpoints.
    std::uint64_t hash() const noexcept;

    bool operator==(const ParamLayout& other) const;

private:
    std::vector<Segment> segments_;
    std::size_t total_ = 0;
};

using LayoutPtr = std::shared_ptr<const ParamLayout>;

// Flat parameter (or gradient) vector tied to a layout.
class ParamVector {
public:
    ParamVector();
    explicit ParamVector(LayoutPtr layout);  // zero-initialized
    ParamVector(LayoutPtr layout, std::vector<double> values);

    static ParamVector zeros_like(const ParamVector& other) { return ParamVector(other.layout_); }

    const LayoutPtr& layout() const noexcept { return layout_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> segment(const std::string& name);
    std::span<const double> segment(const std::string& name) const;

    bool same_layout(const ParamVector& other) const;
    void require_same_layout(const ParamVector& other, const char* what) const;

    // this += alpha * other
    void add_scaled(double alpha, const ParamVector& other);
    ParamVector& operator+=(const ParamVector& other);
    ParamVector& operator-=(const ParamVector& other);
    ParamVector& operator*=(double s);

    void fill(double v);
    double norm() const;
    bool all_finite() const;

private:
    LayoutPtr layout_;
    std::vector<double> values_;
};

ParamVector operator+(ParamVector a, const ParamVector& b);
ParamVector operator-(ParamVector a, const ParamVector& b);
ParamVector operator*(double s, ParamVector a);

}  // namespace vrs
