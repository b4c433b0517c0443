#pragma once

#include <cstddef>
#include <string>

// Weighted exponential sums sum_k coef[k] * exp(-rate[k] * x), the inner loop
// of every factor-law evaluation. A scalar reference implementation is always
// available; vector variants are selected at runtime from the CPU features.
namespace whmc::simd {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);

// Best supported ISA, unless WHMC_SIMD=scalar|avx2|neon is set in the environment.
Isa active_isa();
// Overrides the runtime choice (tests and benchmarks). Throws std::invalid_argument
// when the ISA is not supported by this CPU or build.
void set_isa(Isa isa);

double exp_sum(const double* rate, const double* coef, std::size_t n, double x);
// Two sums sharing the exponentials, e.g. survival and density in one pass.
void exp_sum2(const double* rate, const double* coef_a, const double* coef_b, std::size_t n, double x,
              double& out_a, double& out_b);
void exp_sum_batch(const double* rate, const double* coef, std::size_t n, const double* x, double* out,
                   std::size_t m);

namespace scalar {
double exp_sum(const double* rate, const double* coef, std::size_t n, double x);
void exp_sum2(const double* rate, const double* coef_a, const double* coef_b, std::size_t n, double x,
              double& out_a, double& out_b);
}  // namespace scalar

namespace avx2 {
double exp_sum(const double* rate, const double* coef, std::size_t n, double x);
void exp_sum2(const double* rate, const double* coef_a, const double* coef_b, std::size_t n, double x,
              double& out_a, double& out_b);
// Vector exp on 4-aligned batches; exposed for accuracy tests.
void exp_array(const double* x, double* out, std::size_t n);
}  // namespace avx2

namespace neon {
double exp_sum(const double* rate, const double* coef, std::size_t n, double x);
void exp_sum2(const double* rate, const double* coef_a, const double* coef_b, std::size_t n, double x,
              double& out_a, double& out_b);
void exp_array(const double* x, double* out, std::size_t n);
}  // namespace neon

}  // namespace whmc::simd
