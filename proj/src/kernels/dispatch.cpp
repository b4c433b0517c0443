#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "whmc/simd_kernels.hpp"

namespace whmc::simd {
namespace {

Isa detect_best() {
#if defined(WHMC_HAVE_AVX2)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return Isa::avx2;
    }
#endif
#if defined(WHMC_HAVE_NEON)
    return Isa::neon;
#endif
    return Isa::scalar;
}

Isa initial_isa() {
    const char* env = std::getenv("WHMC_SIMD");
    if (env != nullptr) {
        const std::string v(env);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (v == isa_name(isa) && isa_supported(isa)) {
                return isa;
            }
        }
    }
    return detect_best();
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(WHMC_HAVE_AVX2)
            __builtin_cpu_init();
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(WHMC_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (!isa_supported(isa)) {
        throw std::invalid_argument(std::string("SIMD variant not supported here: ") + isa_name(isa));
    }
    current().store(isa, std::memory_order_relaxed);
}

double exp_sum(const double* rate, const double* coef, std::size_t n, double x) {
    switch (active_isa()) {
#if defined(WHMC_HAVE_AVX2)
        case Isa::avx2: return avx2::exp_sum(rate, coef, n, x);
#endif
#if defined(WHMC_HAVE_NEON)
        case Isa::neon: return neon::exp_sum(rate, coef, n, x);
#endif
        default: return scalar::exp_sum(rate, coef, n, x);
    }
}

void exp_sum2(const double* rate, const double* coef_a, const double* coef_b, std::size_t n, double x,
              double& out_a, double& out_b) {
    switch (active_isa()) {
#if defined(WHMC_HAVE_AVX2)
        case Isa::avx2: avx2::exp_sum2(rate, coef_a, coef_b, n, x, out_a, out_b); return;
#endif
#if defined(WHMC_HAVE_NEON)
        case Isa::neon: neon::exp_sum2(rate, coef_a, coef_b, n, x, out_a, out_b); return;
#endif
        default: scalar::exp_sum2(rate, coef_a, coef_b, n, x, out_a, out_b); return;
    }
}

void exp_sum_batch(const double* rate, const double* coef, std::size_t n, const double* x, double* out,
                   std::size_t m) {
    for (std::size_t j = 0; j < m; ++j) {
        out[j] = exp_sum(rate, coef, n, x[j]);
    }
}

}  // namespace whmc::simd
