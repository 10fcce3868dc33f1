#pragma once

// Dense inner-loop kernels with runtime ISA selection.
//
// Every ISA variant implements the same two primitives (dot, axpy); the
// composite routines (gemv, rank-1 update) are written once on top of them.
// The scalar set is the reference; other sets are checked against it in
// tests/unit/test_simd.cpp. Set VRS_SIMD=scalar in the environment to force the
// reference kernels.

#include <cstddef>
#include <span>
#include <string_view>

namespace vrs::simd {

enum class Isa { scalar, avx2, neon };

struct Kernels {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const Kernels& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// Best available set, chosen on first use.
const Kernels& active();

std::string_view isa_name(Isa isa);

double dot(const Kernels& k, std::span<const double> a, std::span<const double> b);
void axpy(const Kernels& k, double alpha, std::span<const double> x, std::span<double> y);

// out = W x + bias, W row-major rows x cols.
void gemv(const Kernels& k, std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> out);

// W += alpha * u v^T, W row-major (u.size() x v.size()).
void rank1_update(const Kernels& k, double alpha, std::span<const double> u,
                  std::span<const double> v, std::span<double> w);

inline double dot(std::span<const double> a, std::span<const double> b) { return dot(active(), a, b); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) { axpy(active(), alpha, x, y); }
inline void gemv(std::span<const double> w, std::size_t rows, std::size_t cols, std::span<const double> x,
                 std::span<const double> bias, std::span<double> out) {
    gemv(active(), w, rows, cols, x, bias, out);
}
inline void rank1_update(double alpha, std::span<const double> u, std::span<const double> v, std::span<double> w) {
    rank1_update(active(), alpha, u, v, w);
}

}  // namespace vrs::simd
