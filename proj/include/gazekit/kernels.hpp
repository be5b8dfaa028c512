#pragma once

// Data-parallel inner loops shared by the renderer, the toy classifier and the
// metric suite. Each kernel has a scalar reference implementation and optional
// SIMD variants (AVX2+FMA on x86-64, NEON on aarch64). The variant is picked
// once at startup from CPU features; GAZEKIT_SIMD=scalar|avx2|neon overrides.
//
// SIMD variants reassociate sums, so reductions agree with the scalar
// reference to rounding, not bit-for-bit. Elementwise kernels are exact.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace gazekit::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    void (*scale)(double alpha, double* x, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*min_sum)(const double* a, const double* b, std::size_t n);
};

std::string_view isa_name(Isa isa);

/// Variants compiled into this build and supported by the running CPU.
std::vector<Isa> available_isas();
bool isa_available(Isa isa);

const KernelTable& table_for(Isa isa);
const KernelTable& active();

/// Switches the process-wide variant. Intended for tests and benchmarks;
/// not safe to call while other threads use the kernels.
void set_active(Isa isa);

namespace scalar {
const KernelTable& table();
}
#if defined(GAZEKIT_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(GAZEKIT_HAVE_NEON)
namespace neon {
const KernelTable& table();
}
#endif

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    active().mul(a.data(), b.data(), out.data(), a.size());
}
inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline double min_sum(std::span<const double> a, std::span<const double> b) {
    return active().min_sum(a.data(), b.data(), a.size());
}

}  // namespace gazekit::kernels
