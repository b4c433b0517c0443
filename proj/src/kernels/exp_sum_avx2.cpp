#include <immintrin.h>

#include <cmath>

#include "whmc/simd_kernels.hpp"

namespace whmc::simd::avx2 {
namespace {

constexpr double kLog2e = 1.4426950408889634074;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kMinArg = -708.0;
constexpr double kMaxArg = 709.0;

// Taylor coefficients 1/j! for j = 13 down to 0; |r| <= ln2/2 keeps the
// truncation error below 1e-17 relative.
constexpr double kInvFact[14] = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
    1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
    1.0 / 6.0,          0.5,               1.0,              1.0,
};

inline __m256d exp4(__m256d x) {
    const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(kMinArg), _CMP_LT_OQ);
    x = _mm256_max_pd(x, _mm256_set1_pd(kMinArg));
    x = _mm256_min_pd(x, _mm256_set1_pd(kMaxArg));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);
    __m256d p = _mm256_set1_pd(kInvFact[0]);
    for (int j = 1; j < 14; ++j) {
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[j]));
    }
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i bits = _mm256_cvtepi32_epi64(n32);
    bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    const __m256d out = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
    return _mm256_andnot_pd(underflow, out);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void exp_array(const double* x, double* out, std::size_t n) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(out + k, exp4(_mm256_loadu_pd(x + k)));
    }
    if (k < n) {
        alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t j = k; j < n; ++j) {
            buf[j - k] = x[j];
        }
        _mm256_store_pd(buf, exp4(_mm256_load_pd(buf)));
        for (std::size_t j = k; j < n; ++j) {
            out[j] = buf[j - k];
        }
    }
}

double exp_sum(const double* rate, const double* coef, std::size_t n, double x) {
    const __m256d vx = _mm256_set1_pd(-x);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        const __m256d e0 = exp4(_mm256_mul_pd(_mm256_loadu_pd(rate + k), vx));
        const __m256d e1 = exp4(_mm256_mul_pd(_mm256_loadu_pd(rate + k + 4), vx));
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(coef + k), e0, acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(coef + k + 4), e1, acc1);
    }
    for (; k + 4 <= n; k += 4) {
        const __m256d e = exp4(_mm256_mul_pd(_mm256_loadu_pd(rate + k), vx));
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(coef + k), e, acc0);
    }
    double tail = 0.0;
    for (; k < n; ++k) {
        tail += coef[k] * std::exp(-rate[k] * x);
    }
    return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

void exp_sum2(const double* rate, const double* coef_a, const double* coef_b, std::size_t n, double x,
              double& out_a, double& out_b) {
    const __m256d vx = _mm256_set1_pd(-x);
    __m256d acc_a = _mm256_setzero_pd();
    __m256d acc_b = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d e = exp4(_mm256_mul_pd(_mm256_loadu_pd(rate + k), vx));
        acc_a = _mm256_fmadd_pd(_mm256_loadu_pd(coef_a + k), e, acc_a);
        acc_b = _mm256_fmadd_pd(_mm256_loadu_pd(coef_b + k), e, acc_b);
    }
    double ta = 0.0;
    double tb = 0.0;
    for (; k < n; ++k) {
        const double e = std::exp(-rate[k] * x);
        ta += coef_a[k] * e;
        tb += coef_b[k] * e;
    }
    out_a = hsum(acc_a) + ta;
    out_b = hsum(acc_b) + tb;
}

}  // namespace whmc::simd::avx2
