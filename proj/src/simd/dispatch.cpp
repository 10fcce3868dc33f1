#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "vrs/errors.hpp"
#include "vrs/simd.hpp"

namespace vrs::simd {

namespace {

bool forced_scalar() {
    const char* env = std::getenv("VRS_SIMD");
    return env != nullptr && std::string(env) == "scalar";
}

const Kernels* pick() {
    if (forced_scalar()) return &scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return k;
    if (const Kernels* k = neon_kernels()) return k;
    return &scalar_kernels();
}

void require(bool ok, const char* what) {
    if (!ok) throw ShapeError(what);
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{Isa::scalar, &detail::dot_scalar, &detail::axpy_scalar};
    return k;
}

const Kernels* avx2_kernels() {
#if defined(VRS_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const Kernels k{Isa::avx2, &detail::dot_avx2, &detail::axpy_avx2};
    return supported ? &k : nullptr;
#else
    return nullptr;
#endif
}

const Kernels* neon_kernels() {
#if defined(VRS_HAVE_NEON)
    static const Kernels k{Isa::neon, &detail::dot_neon, &detail::axpy_neon};
    return &k;
#else
    return nullptr;
#endif
}

const Kernels& active() {
    static const Kernels* k = pick();
    return *k;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

double dot(const Kernels& k, std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "dot: length mismatch");
    return k.dot(a.data(), b.data(), a.size());
}

void axpy(const Kernels& k, double alpha, std::span<const double> x, std::span<double> y) {
    require(x.size() == y.size(), "axpy: length mismatch");
    k.axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(const Kernels& k, std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> out) {
    require(w.size() == rows * cols, "gemv: weight size mismatch");
    require(x.size() == cols, "gemv: input length mismatch");
    require(bias.size() == rows && out.size() == rows, "gemv: output length mismatch");
    for (std::size_t r = 0; r < rows; ++r) {
        out[r] = k.dot(w.data() + r * cols, x.data(), cols) + bias[r];
    }
}

void rank1_update(const Kernels& k, double alpha, std::span<const double> u, std::span<const double> v,
                  std::span<double> w) {
    require(w.size() == u.size() * v.size(), "rank1_update: weight size mismatch");
    const std::size_t cols = v.size();
    for (std::size_t r = 0; r < u.size(); ++r) {
        const double s = alpha * u[r];
        if (s != 0.0) k.axpy(s, v.data(), w.data() + r * cols, cols);
    }
}

}  // namespace vrs::simd
