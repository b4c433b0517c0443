#include <arm_neon.h>

#include <cmath>

#include "whmc/simd_kernels.hpp"

namespace whmc::simd::neon {
namespace {

constexpr double kLog2e = 1.4426950408889634074;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kMinArg = -708.0;
constexpr double kMaxArg = 709.0;

constexpr double kInvFact[14] = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
    1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
    1.0 / 6.0,          0.5,               1.0,              1.0,
};

inline float64x2_t exp2v(float64x2_t x) {
    const uint64x2_t underflow = vcltq_f64(x, vdupq_n_f64(kMinArg));
    x = vmaxq_f64(x, vdupq_n_f64(kMinArg));
    x = vminq_f64(x, vdupq_n_f64(kMaxArg));
    const float64x2_t n = vrndnq_f64(vmulq_f64(x, vdupq_n_f64(kLog2e)));
    float64x2_t r = vfmsq_f64(x, n, vdupq_n_f64(kLn2Hi));
    r = vfmsq_f64(r, n, vdupq_n_f64(kLn2Lo));
    float64x2_t p = vdupq_n_f64(kInvFact[0]);
    for (int j = 1; j < 14; ++j) {
        p = vfmaq_f64(vdupq_n_f64(kInvFact[j]), p, r);
    }
    int64x2_t bits = vaddq_s64(vcvtq_s64_f64(n), vdupq_n_s64(1023));
    bits = vshlq_n_s64(bits, 52);
    const float64x2_t out = vmulq_f64(p, vreinterpretq_f64_s64(bits));
    return vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(out), underflow));
}

}  // namespace

void exp_array(const double* x, double* out, std::size_t n) {
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        vst1q_f64(out + k, exp2v(vld1q_f64(x + k)));
    }
    for (; k < n; ++k) {
        out[k] = std::exp(x[k]);
    }
}

double exp_sum(const double* rate, const double* coef, std::size_t n, double x) {
    const float64x2_t vx = vdupq_n_f64(-x);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t e = exp2v(vmulq_f64(vld1q_f64(rate + k), vx));
        acc = vfmaq_f64(acc, vld1q_f64(coef + k), e);
    }
    double tail = 0.0;
    for (; k < n; ++k) {
        tail += coef[k] * std::exp(-rate[k] * x);
    }
    return vaddvq_f64(acc) + tail;
}

void exp_sum2(const double* rate, const double* coef_a, const double* coef_b, std::size_t n, double x,
              double& out_a, double& out_b) {
    const float64x2_t vx = vdupq_n_f64(-x);
    float64x2_t acc_a = vdupq_n_f64(0.0);
    float64x2_t acc_b = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t e = exp2v(vmulq_f64(vld1q_f64(rate + k), vx));
        acc_a = vfmaq_f64(acc_a, vld1q_f64(coef_a + k), e);
        acc_b = vfmaq_f64(acc_b, vld1q_f64(coef_b + k), e);
    }
    double ta = 0.0;
    double tb = 0.0;
    for (; k < n; ++k) {
        const double e = std::exp(-rate[k] * x);
        ta += coef_a[k] * e;
        tb += coef_b[k] * e;
    }
    out_a = vaddvq_f64(acc_a) + ta;
    out_b = vaddvq_f64(acc_b) + tb;
}

}  // namespace whmc::simd::neon
