#pragma once

#include <cstddef>
#include <span>

// Double-precision arithmetic kernels behind the encoder backend and the
// similarity scorers. Each kernel has a plain scalar reference
// implementation and an AVX2+FMA variant; the active set is picked once at
// runtime from CPU features. Set SQZ_KERNELS=scalar|avx2 to override.
//
// On non-x86 builds only the scalar set exists.

namespace sqz::kernels {

enum class Isa { scalar, avx2 };

// Instruction set the process is currently dispatching to.
Isa active_isa();
const char* isa_name(Isa isa);

// Test hook: force a specific instruction set. Throws if the requested
// set is not available on this CPU. Not thread-safe; call before any
// concurrent kernel use.
void force_isa(Isa isa);

// sum_i x[i] * y[i]
double dot(const double* x, const double* y, std::size_t n);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// x[i] *= a
void scale(double a, double* x, std::size_t n);

// C[m x n] += A[m x k] * B[k x n], all row-major, C accumulated in place.
void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n);

inline double dot(std::span<const double> x, std::span<const double> y) {
    return dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    axpy(a, x.data(), y.data(), x.size());
}
inline void scale(double a, std::span<double> x) { scale(a, x.data(), x.size()); }

namespace detail {

// Reference implementations, always available; the equivalence tests
// compare the dispatched kernels against these.
double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void scale_scalar(double a, double* x, std::size_t n);
void matmul_scalar(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n);

bool cpu_has_avx2();

} // namespace detail

} // namespace sqz::kernels
