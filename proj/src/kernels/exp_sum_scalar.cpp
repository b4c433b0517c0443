#include <cmath>

#include "whmc/simd_kernels.hpp"

namespace whmc::simd::scalar {

double exp_sum(const double* rate, const double* coef, std::size_t n, double x) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += coef[k] * std::exp(-rate[k] * x);
    }
    return acc;
}

void exp_sum2(const double* rate, const double* coef_a, const double* coef_b, std::size_t n, double x,
              double& out_a, double& out_b) {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = std::exp(-rate[k] * x);
        a += coef_a[k] * e;
        b += coef_b[k] * e;
    }
    out_a = a;
    out_b = b;
}

}  // namespace whmc::simd::scalar
