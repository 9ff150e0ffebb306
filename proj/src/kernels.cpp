#include "sqz/kernels.hpp"

#include "sqz/common.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#define SQZ_X86 1
#include <immintrin.h>
#else
#define SQZ_X86 0
#endif

namespace sqz::kernels {

namespace detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void matmul_scalar(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            double aip = arow[p];
            if (aip == 0.0) continue;
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
}

bool cpu_has_avx2() {
#if SQZ_X86
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

#if SQZ_X86

__attribute__((target("avx2,fma")))
double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    __m256d acc = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d s2 = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

__attribute__((target("avx2,fma")))
void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma")))
void scale_avx2(double a, double* x, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

__attribute__((target("avx2,fma")))
void matmul_avx2(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            double aip = arow[p];
            if (aip == 0.0) continue;
            const double* brow = b + p * n;
            __m256d va = _mm256_set1_pd(aip);
            std::size_t j = 0;
            for (; j + 8 <= n; j += 8) {
                __m256d c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j),
                                             _mm256_loadu_pd(crow + j));
                __m256d c1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j + 4),
                                             _mm256_loadu_pd(crow + j + 4));
                _mm256_storeu_pd(crow + j, c0);
                _mm256_storeu_pd(crow + j + 4, c1);
            }
            for (; j + 4 <= n; j += 4) {
                _mm256_storeu_pd(crow + j,
                                 _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j),
                                                 _mm256_loadu_pd(crow + j)));
            }
            for (; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
}

#endif // SQZ_X86

struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*matmul)(const double*, const double*, double*, std::size_t, std::size_t, std::size_t);
    Isa isa;
};

constexpr Ops kScalarOps{dot_scalar, axpy_scalar, scale_scalar, matmul_scalar, Isa::scalar};

#if SQZ_X86
constexpr Ops kAvx2Ops{dot_avx2, axpy_avx2, scale_avx2, matmul_avx2, Isa::avx2};
#endif

const Ops* resolve_ops() {
    const char* env = std::getenv("SQZ_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalarOps;
#if SQZ_X86
    if (env != nullptr && std::strcmp(env, "avx2") == 0) {
        if (!cpu_has_avx2()) throw Error("SQZ_KERNELS=avx2 but CPU lacks AVX2/FMA");
        return &kAvx2Ops;
    }
    if (cpu_has_avx2()) return &kAvx2Ops;
#endif
    return &kScalarOps;
}

const Ops*& active_ops() {
    static const Ops* ops = resolve_ops();
    return ops;
}

} // namespace detail

Isa active_isa() { return detail::active_ops()->isa; }

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "?";
}

void force_isa(Isa isa) {
    if (isa == Isa::scalar) {
        detail::active_ops() = &detail::kScalarOps;
        return;
    }
#if SQZ_X86
    if (isa == Isa::avx2 && detail::cpu_has_avx2()) {
        detail::active_ops() = &detail::kAvx2Ops;
        return;
    }
#endif
    throw Error("requested instruction set not available on this CPU");
}

double dot(const double* x, const double* y, std::size_t n) {
    return detail::active_ops()->dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    detail::active_ops()->axpy(a, x, y, n);
}

void scale(double a, double* x, std::size_t n) {
    detail::active_ops()->scale(a, x, n);
}

void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n) {
    detail::active_ops()->matmul(a, b, c, m, k, n);
}

} // namespace sqz::kernels
