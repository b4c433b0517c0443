// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <complex>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>

#include "stat_utils.hpp"
#include "test_models.hpp"
#include "whmc/fourier_engine.hpp"
#include "whmc/pricing.hpp"
#include "whmc/wh_factorization.hpp"
#include "whmc/whmc_engine.hpp"

using namespace whmc;

namespace {

constexpr double kR = 0.05;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

FactorizationPair laws_at(const LevyModel& m, double lambda, std::size_t K = 128) {
    FactorizationOptions opt;
    opt.K = K;
    return build_factorization(m, lambda, opt);
}

SimConfig sim(std::size_t steps, std::size_t paths, std::uint64_t seed) {
    SimConfig c;
    c.n_steps = steps;
    c.n_paths = paths;
    c.seed = seed;
    c.workers = 1;
    return c;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

// Interval of root n on one side of a beta-family model: (0, beta alpha) for n = 0,
// then consecutive poles beta (alpha + n - 1), beta (alpha + n).
std::pair<long double, long double> beta_interval(double alpha, double beta, std::size_t n) {
    if (n == 0) {
        return {0.0L, static_cast<long double>(beta) * alpha};
    }
    return {static_cast<long double>(beta) * (alpha + n - 1.0), static_cast<long double>(beta) * (alpha + n)};
}

void criterion_1(Outcome& o) {
    const auto start = std::chrono::steady_clock::now();
    long double worst = 0.0L;
    std::size_t outside = 0, roots = 0;
    for (const auto& p : {testing::set1_params(), testing::set2_params()}) {
        const LevyModel m = LevyModel::beta_family(p);
        for (double lambda : {20.0, 100.0}) {
            const RootLadder lad = locate_roots(m, lambda, 128);
            for (std::size_t n = 0; n < lad.plus_roots.size(); ++n) {
                const auto [lo, hi] = beta_interval(p.alpha2, p.beta2, n);
                const long double z = lad.plus_roots[n];
                outside += !(z > lo && z < hi);
                worst = std::max(worst, std::fabs(lambda + m.psi_axis(z)));
                ++roots;
            }
            for (std::size_t n = 0; n < lad.minus_roots.size(); ++n) {
                const auto [lo, hi] = beta_interval(p.alpha1, p.beta1, n);
                const long double z = -lad.minus_roots[n];
                outside += !(z > lo && z < hi);
                worst = std::max(worst, std::fabs(lambda + m.psi_axis(lad.minus_roots[n])));
                ++roots;
            }
            o.require(lad.plus_roots.size() >= 128 && lad.minus_roots.size() >= 128, "128 roots per side");
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail << roots << " roots, " << outside << " outside their interval, max |lambda+Psi(i z)| = "
             << static_cast<double>(worst) << ", " << secs << " s";
    o.require(outside == 0, "bracket containment");
    o.require(worst < 1e-10L, "residual < 1e-10");
    o.require(secs < 1.0, "runtime < 1 s");
}

void criterion_2(Outcome& o) {
    const auto grid = linspace(-10.0, 10.0, 41);
    for (double lambda : {20.0, 100.0}) {
        const LevyModel m = testing::set1();
        const double e128 = wiener_hopf_identity_error(laws_at(m, lambda, 128), m, grid);
        const double e256 = wiener_hopf_identity_error(laws_at(m, lambda, 256), m, grid);
        o.detail << "Set 1 lambda=" << lambda << ": K=128 " << e128 << ", K=256 " << e256 << "; ";
        o.require(e128 < 1e-4, "K=128 error < 1e-4");
        o.require(e256 < e128, "K=256 error smaller");
    }
    // the sigma = 0 set converges in K much more slowly; reported, and only the decrease is required
    const LevyModel m2 = testing::set2();
    const double f128 = wiener_hopf_identity_error(laws_at(m2, 100.0, 128), m2, grid);
    const double f256 = wiener_hopf_identity_error(laws_at(m2, 100.0, 256), m2, grid);
    o.detail << "Set 2 lambda=100 (informational): K=128 " << f128 << ", K=256 " << f256;
    o.require(f256 < f128, "Set 2 K=256 error smaller");
}

void criterion_3(Outcome& o) {
    const auto p = testing::set2_params();
    const LevyModel s2 = LevyModel::beta_family(p);
    double worst = 0.0, atom = 0.0;
    for (double lambda : {20.0, 100.0}) {
        const RootLadder lad = locate_roots(s2, lambda, 256);
        CoefficientDiagnostics diag;
        const FactorLaw sup = factor_coefficients(lad, s2, Side::sup, &diag);
        long double prod = 1.0L;
        for (std::size_t n = 0; n < lad.minus_roots.size(); ++n) {
            prod *= -lad.minus_roots[n] / (p.beta1 * (n + p.alpha1));
        }
        worst = std::max(worst, std::fabs(diag.raw_atom - static_cast<double>(prod)));
        atom = sup.atom0();
    }
    const LevyModel s1 = testing::set1();
    const double atom1 = factor_coefficients(locate_roots(s1, 100.0, 256), s1, Side::sup).atom0();
    o.detail << "Set 2 |(1 - sum c) - product| = " << worst << " (atom " << atom << " at lambda=100), Set 1 atom = "
             << atom1;
    o.require(worst < 1e-6, "Set 2 atom cross-check");
    o.require(atom > 0.0, "Set 2 atom positive");
    o.require(atom1 < 1e-6, "Set 1 atom < 1e-6");
}

void criterion_4(Outcome& o) {
    const auto start = std::chrono::steady_clock::now();
    const LevyModel m = testing::set1();
    const std::vector<double> thetas{0.5, 1.0, 2.0};
    double worst_z = 0.0;
    for (std::size_t n : {1u, 20u, 100u}) {
        const SimConfig cfg = sim(n, 1000000, 4);
        const auto laws = laws_at(m, cfg.lambda());
        const CounterRng rng(cfg.seed);
        const auto est = estimate_functionals(
            6,
            [&](std::uint64_t path, double* out) {
                const double v = simulate_pair(laws, n, rng, path).V;
                for (std::size_t k = 0; k < 3; ++k) {
                    out[2 * k] = std::cos(thetas[k] * v);
                    out[2 * k + 1] = std::sin(thetas[k] * v);
                }
            },
            cfg);
        for (std::size_t k = 0; k < 3; ++k) {
            const double lam = cfg.lambda();
            const cplx exact = std::pow(lam / (lam + m.psi(cplx(thetas[k], 0.0))), static_cast<double>(n));
            worst_z = std::max(worst_z, std::fabs(est[2 * k].value - exact.real()) / est[2 * k].std_error);
            worst_z = std::max(worst_z, std::fabs(est[2 * k + 1].value - exact.imag()) / est[2 * k + 1].std_error);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail << "max |empirical - exact| / SE = " << worst_z << " over n in {1,20,100}, theta in {0.5,1,2}; " << secs
             << " s";
    o.require(worst_z < 4.0, "within 4 SE");
    o.require(secs < 60.0, "runtime < 60 s");
}

void criterion_5(Outcome& o) {
    const LevyModel m = testing::set1();
    const SimConfig cfg = sim(100, 1000000, 5);
    const auto laws = laws_at(m, cfg.lambda());
    const CounterRng rng(cfg.seed);
    const double disc = std::exp(-kR);
    const Estimate e = estimate_functional<PairSample>(
        [&](std::uint64_t path) { return simulate_pair(laws, 100, rng, path); },
        [&](const PairSample& s) { return disc * std::exp(s.V); }, cfg);
    const double z = (e.value - 1.0) / e.std_error;
    o.detail << "exp(-r) mean exp(V) = " << e.value << " +- " << e.std_error << " (z = " << z << ")";
    o.require(std::fabs(z) < 4.0, "within 4 SE of 1");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// E[(f e^{eps Z - eps^2/2} - K)^+]
double mollified_call(double f, double strike, double eps) {
    const double d1 = (std::log(f / strike) + 0.5 * eps * eps) / eps;
    return f * normal_cdf(d1) - strike * normal_cdf(d1 - eps);
}

void criterion_6(Outcome& o) {
    const LevyModel m = testing::set1();
    const double s = 5.0, strike = 5.0, eps = 0.2, disc = std::exp(-kR);
    // mollification adds eps Z - eps^2 / 2 to the log price
    const auto smooth = [eps](cplx th) { return 0.5 * eps * eps * th * th + cplx(0.0, 0.5 * eps * eps) * th; };
    const double reference =
        lewis_call_price([&](cplx th) { return m.psi(th) + smooth(th); }, s, strike, kR, 1.0);
    const std::vector<std::size_t> n_list{10, 20, 50, 100, 200};
    std::vector<double> exact_bias, exact_put;
    for (std::size_t n : n_list) {
        const double lam = static_cast<double>(n);
        const auto psi_n = [&](cplx th) { return -lam * std::log(lam / (lam + m.psi(th))) + smooth(th); };
        const double call = lewis_call_price(psi_n, s, strike, kR, 1.0);
        exact_bias.push_back(call - reference);
        // put by parity with the gamma-time forward E[e^V] = (n / (n - r))^n
        exact_put.push_back(call - disc * (s * std::pow(lam / (lam - kR), lam) - strike));
    }
    // the call has infinite variance under this model, so the simulation check uses the bounded put
    const auto rows = convergence_study(
        m,
        [&](const PairSample& p) {
            const double f = s * std::exp(p.V);
            return disc * (mollified_call(f, strike, eps) - f + strike);
        },
        1.0, n_list, sim(1, 200000, 6));
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, worst_z = 0.0;
    o.detail << "reference " << reference << "; n:call bias/put MC-exact z =";
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        const double x = std::log(static_cast<double>(n_list[i])), y = std::log(std::fabs(exact_bias[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        const double z = (rows[i].value - exact_put[i]) / rows[i].std_error;
        worst_z = std::max(worst_z, std::fabs(z));
        o.detail << " " << n_list[i] << ":" << exact_bias[i] << "/" << z;
    }
    const double k = static_cast<double>(n_list.size());
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    o.detail << "; fitted slope " << slope;
    o.require(slope <= -0.45, "slope <= -0.45");
    o.require(worst_z < 4.0, "WHMC estimates match the exact gamma-time values");
}

void criterion_7(Outcome& o) {
    const LevyModel m = testing::set1();
    const std::size_t n = 100, paths = 1000000;
    const auto laws = laws_at(m, static_cast<double>(n));
    const CounterRng rng(7);
    std::size_t violations = 0, bound_violations = 0;
    const double s = 6.0, strike = 5.0, bu = 10.0, bl = 3.0;
    for (std::uint64_t path = 0; path < paths; ++path) {
        const auto p = simulate_triple(laws, n, rng, path);
        violations += !(p.Jt <= p.J) + !(p.Kt <= p.K) + !(p.J >= 0.0) + !(p.K <= 0.0);
        const double g = std::max(s * std::exp(p.V) - strike, 0.0);
        const double uo = s * std::exp(p.J) < bu ? g : 0.0;
        const double pi1 = uo - ((s * std::exp(p.Jt) < bu && s * std::exp(p.Kt) < bl) ? g : 0.0);
        const double pi2 = uo - ((s * std::exp(p.J) < bu && s * std::exp(p.K) < bl) ? g : 0.0);
        bound_violations += !(pi1 <= pi2);
    }
    BarrierSpec spec;
    spec.strike = strike;
    spec.b_upper = bu;
    spec.b_lower = bl;
    spec.r = kR;
    PricingConfig cfg;
    cfg.sim = sim(n, 100000, 7);
    std::size_t curve_violations = 0;
    for (const auto& pt : double_no_touch_curve(m, spec, linspace(3.25, 9.75, 27), cfg)) {
        curve_violations += !(pt.bounds.lower.value <= pt.bounds.upper.value);
    }
    o.detail << paths << " paths: " << violations << " ordering violations, " << bound_violations
             << " paths with pi1 > pi2, " << curve_violations << " curve points with lower > upper";
    o.require(violations == 0, "orderings");
    o.require(bound_violations == 0 && curve_violations == 0, "pi1 <= pi2");
}

void criterion_8(Outcome& o) {
    std::size_t mismatches = 0;
    {
        const auto laws = laws_at(testing::set1(), 50.0);
        const CounterRng rng(8);
        JumpAugmentation aug;
        aug.gamma = 0.0;
        aug.jumps = JumpDistribution::two_sided_exponential(0.4, 3.0, 2.0);
        for (std::uint64_t path = 0; path < 100000; ++path) {
            const auto a = simulate_jump_augmented(laws, aug, 50, 50.0, rng, path);
            const auto p = simulate_pair(laws, 50, rng, path);
            mismatches += !(a.V == p.V && a.J == p.J && a.steps == 50);
        }
    }
    const double mu = 0.1, sigma = 0.3, gamma = 5.0, lambda = 50.0;
    const std::size_t n = 50, paths = 100000;
    const auto jumps = JumpDistribution::two_sided_exponential(0.4, 4.0, 3.0);
    const JumpAugmentation aug{gamma, jumps};
    const auto laws = brownian_factorization(mu, sigma, lambda + gamma);
    const CounterRng rng(88);
    std::vector<double> v_whmc, j_whmc;
    for (std::uint64_t path = 0; path < paths; ++path) {
        const auto a = simulate_jump_augmented(laws, aug, n, lambda, rng, path);
        v_whmc.push_back(a.V);
        j_whmc.push_back(a.J);
    }
    // direct simulation on an exact Gamma(n, lambda) horizon with Brownian-bridge maxima between jumps
    std::mt19937_64 gen(8888);
    std::exponential_distribution<double> e_lambda(lambda), e_gamma(gamma);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> v_ref, j_ref;
    for (std::size_t p = 0; p < paths; ++p) {
        double horizon = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            horizon += e_lambda(gen);
        }
        double now = 0.0, level = 0.0, sup = 0.0;
        while (true) {
            const double next_jump = now + e_gamma(gen);
            const double end = std::min(next_jump, horizon);
            const double h = end - now;
            const double d = mu * h + sigma * std::sqrt(h) * z(gen);
            sup = std::max(sup, level + 0.5 * (d + std::sqrt(d * d - 2.0 * sigma * sigma * h * std::log(1.0 - unif(gen)))));
            level += d;
            now = end;
            if (next_jump >= horizon) {
                break;
            }
            level += jumps.sample(unif(gen), 1.0 - unif(gen));
            sup = std::max(sup, level);
        }
        v_ref.push_back(level);
        j_ref.push_back(sup);
    }
    const double crit = testing::ks_critical_1pct(paths, paths);
    const double ks_v = testing::ks_statistic(v_whmc, v_ref), ks_j = testing::ks_statistic(j_whmc, j_ref);
    o.detail << mismatches << " mismatches at gamma=0 over 1e5 paths; KS(V) = " << ks_v << ", KS(J) = " << ks_j
             << ", 1% critical " << crit;
    o.require(mismatches == 0, "bit-identical reduction");
    o.require(ks_v < crit && ks_j < crit, "KS below 1% critical value");
}

BarrierSpec up_and_out_spec() {
    BarrierSpec spec;
    spec.strike = 5.0;
    spec.b_upper = 10.0;
    spec.r = kR;
    spec.t = 1.0;
    return spec;
}

void criterion_9(Outcome& o) {
    const LevyModel m = testing::set1();
    PricingConfig cfg;
    cfg.sim = sim(100, 100000, 9);
    const std::vector<double> spots{2.0, 4.0, 6.0, 8.0, 9.5};
    const auto fourier = price_curve(m, up_and_out_spec(), spots, Engine::fourier, cfg);
    const auto whmc = price_curve(m, up_and_out_spec(), spots, Engine::whmc, cfg);
    const auto baseline = price_curve(m, up_and_out_spec(), spots, Engine::baseline, cfg);
    double worst_z = 0.0;
    o.detail << "s:fourier/whmc(z)/baseline(z) =";
    for (std::size_t i = 0; i < spots.size(); ++i) {
        const double zw = (whmc[i].estimate.value - fourier[i].estimate.value) / whmc[i].estimate.std_error;
        const double zb = (baseline[i].estimate.value - fourier[i].estimate.value) / baseline[i].estimate.std_error;
        worst_z = std::max(worst_z, std::fabs(zw));
        o.detail << " " << spots[i] << ":" << fourier[i].estimate.value << "/" << whmc[i].estimate.value << "(" << zw
                 << ")/" << baseline[i].estimate.value << "(" << zb << ")";
    }
    const double err_w = std::fabs(whmc.back().estimate.value - fourier.back().estimate.value);
    const double err_b = std::fabs(baseline.back().estimate.value - fourier.back().estimate.value);
    o.detail << "; at s=9.5 |error| whmc " << err_w << ", baseline " << err_b;
    o.require(worst_z < 3.0, "WHMC within 3 SE of the benchmark");
    o.require(err_b > err_w, "baseline error exceeds WHMC error near the barrier");
}

// P(J(n) = 0) implied by the recursion with the given laws. The sub-density of
// u = -V on {J = 0} lives on the lattice h Z+ up to u_max; each step keeps the
// part with S <= u, then adds -I. Lattice error is O(h).
double atom_by_recursion(const FactorizationPair& laws, std::size_t n, double h, double u_max) {
    const std::size_t N = static_cast<std::size_t>(u_max / h) + 1;
    std::size_t L = 1;
    while (L < 2 * N) {
        L <<= 1;
    }
    const auto kernel = [&](const FactorLaw& law) {
        std::vector<double> k(N);
        for (std::size_t d = 0; d < N; ++d) {
            k[d] = (d == 0 ? 1.0 : law.survival((d - 0.5) * h)) - law.survival((d + 0.5) * h);
        }
        return k;
    };
    using spectrum = std::vector<std::complex<double>>;
    std::vector<double> buf(L);
    spectrum spec(L / 2 + 1);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(L), buf.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                                         FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(L), reinterpret_cast<fftw_complex*>(spec.data()), buf.data(),
                                         FFTW_ESTIMATE);
    const auto ks = kernel(laws.sup_law), ki = kernel(laws.inf_law);
    // S-step is a correlation: place the kernel reversed (index -d at L - d)
    std::fill(buf.begin(), buf.end(), 0.0);
    buf[0] = ks[0];
    for (std::size_t d = 1; d < N; ++d) {
        buf[L - d] = ks[d];
    }
    fftw_execute(fwd);
    const spectrum ks_f = spec;
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy(ki.begin(), ki.end(), buf.begin());
    fftw_execute(fwd);
    const spectrum ki_f = spec;
    const auto apply = [&](std::vector<double>& x, const spectrum& k) {
        std::fill(buf.begin(), buf.end(), 0.0);
        std::copy(x.begin(), x.end(), buf.begin());
        fftw_execute(fwd);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            spec[i] *= k[i] / static_cast<double>(L);
        }
        fftw_execute(bwd);
        for (std::size_t i = 0; i < N; ++i) {
            x[i] = std::max(buf[i], 0.0);
        }
    };
    std::vector<double> m(N, 0.0);
    m[0] = 1.0;
    for (std::size_t step = 0; step < n; ++step) {
        apply(m, ks_f);
        apply(m, ki_f);
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    double total = 0.0;
    for (double x : m) {
        total += x;
    }
    return total;
}

void criterion_10(Outcome& o) {
    const std::size_t n = 100, paths = 200000;
    std::size_t zeros2 = 0, zeros1 = 0;
    {
        const auto laws = laws_at(testing::set2(), static_cast<double>(n));
        const CounterRng rng(10);
        for (std::uint64_t p = 0; p < paths; ++p) {
            zeros2 += simulate_pair(laws, n, rng, p).J == 0.0;
        }
    }
    {
        const auto laws = laws_at(testing::set1(), static_cast<double>(n));
        const CounterRng rng(10);
        for (std::uint64_t p = 0; p < paths; ++p) {
            zeros1 += simulate_pair(laws, n, rng, p).J == 0.0;
        }
    }
    const auto laws2 = laws_at(testing::set2(), static_cast<double>(n));
    // Richardson extrapolation of the O(h) lattice error
    const double law_p = 2.0 * atom_by_recursion(laws2, n, 1e-4, 12.0) - atom_by_recursion(laws2, n, 2e-4, 12.0);
    const double inverted = sup_atom_probability(testing::set2(), 1.0, {}, GammaTime{n, static_cast<double>(n)});
    const double frac2 = static_cast<double>(zeros2) / paths, frac1 = static_cast<double>(zeros1) / paths;
    const double se = std::sqrt(law_p * (1.0 - law_p) / paths);
    o.detail << "Set 2 fraction J=0 " << frac2 << " vs law-implied " << law_p << " (z = " << (frac2 - law_p) / se
             << "; gamma-time inversion at K=128, informational: " << inverted << "), Set 1 fraction " << frac1;
    o.require(frac2 > 0.0 && std::fabs(frac2 - law_p) < 4.0 * se, "Set 2 atom fraction");
    o.require(frac1 < 1e-5, "Set 1 fraction < 1e-5");

    PricingConfig cfg;
    cfg.sim = sim(n, 100000, 10);
    const std::vector<double> near{9.9, 9.99};
    const auto c2 = price_curve(testing::set2(), up_and_out_spec(), near, Engine::whmc, cfg);
    const auto c1 = price_curve(testing::set1(), up_and_out_spec(), near, Engine::whmc, cfg);
    const auto f2 = price_curve(testing::set2(), up_and_out_spec(), {9.99}, Engine::fourier, cfg);
    o.detail << "; price at s=9.9, 9.99: Set 2 " << c2[0].estimate.value << ", " << c2[1].estimate.value
             << " (benchmark " << f2[0].estimate.value << "), Set 1 " << c1[0].estimate.value << ", "
             << c1[1].estimate.value;
    o.require(c2[1].estimate.value > 4.0 * c2[1].estimate.std_error && f2[0].estimate.value > 0.01,
              "Set 2 limit positive");
    o.require(c1[1].estimate.value < c1[0].estimate.value && c1[1].estimate.value < 1e-3, "Set 1 limit zero");
}

void criterion_11(Outcome& o) {
    const LevyModel m = testing::set1();
    BarrierSpec spec = up_and_out_spec();
    spec.b_lower = 3.0;
    PricingConfig cfg;
    cfg.sim = sim(200, 100000, 11);
    cfg.baseline_steps = 400;
    const auto spots = linspace(3.25, 9.75, 27);
    const auto bounds = double_no_touch_curve(m, spec, spots, cfg);
    const auto baseline = price_curve(m, spec, spots, Engine::baseline, cfg);
    std::size_t ordered = 0, above = 0;
    for (std::size_t i = 0; i < spots.size(); ++i) {
        const auto& b = bounds[i].bounds;
        ordered += b.lower.value <= b.upper.value;
        const double se = std::hypot(baseline[i].estimate.std_error, b.upper.std_error);
        above += baseline[i].estimate.value >= b.upper.value - 2.0 * se;
    }
    const double frac = static_cast<double>(above) / spots.size();
    o.detail << ordered << "/" << spots.size() << " points with lower <= upper; baseline >= upper - 2 SE at " << above
             << "/" << spots.size() << " points (" << 100.0 * frac << "%); at s=6: lower "
             << bounds[11].bounds.lower.value << ", upper " << bounds[11].bounds.upper.value << ", baseline "
             << baseline[11].estimate.value;
    o.require(ordered == spots.size(), "lower <= upper everywhere");
    o.require(frac >= 0.8, "baseline above upper bound at >= 80% of points");
}

void criterion_12(Outcome& o) {
    const LevyModel m = testing::set1();
    const std::size_t nx = 10, ny = 20;
    const double x_max = 1.0, y_max = 4.0, dx = x_max / nx, dy = y_max / ny;
    std::vector<double> xc, yc, xe = linspace(0.0, x_max, nx + 1), ye = linspace(0.0, y_max, ny + 1);
    for (std::size_t i = 0; i < nx; ++i) {
        xc.push_back((i + 0.5) * dx);
    }
    for (std::size_t j = 0; j < ny; ++j) {
        yc.push_back((j + 0.5) * dy);
    }
    ContourSpec base;
    ContourSpec more_panels = base;
    more_panels.panels = 1024;
    ContourSpec taller = base;
    taller.min_height = 100.0;
    const auto d0 = joint_density(m, 1.0, xc, yc, base);
    const auto d1 = joint_density(m, 1.0, xc, yc, more_panels);
    const auto d2 = joint_density(m, 1.0, xc, yc, taller);
    double change = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < d0.values.size(); ++k) {
        change = std::max({change, std::fabs(d1.values[k] - d0.values[k]), std::fabs(d2.values[k] - d0.values[k])});
        peak = std::max(peak, d0.values[k]);
    }
    // bin averages of the fixed-time density against WHMC histograms
    const auto masses = joint_bin_masses(m, 1.0, xe, ye, base);
    std::vector<double> discrepancy;
    for (std::size_t n : {20u, 100u}) {
        const auto laws = laws_at(m, static_cast<double>(n));
        const CounterRng rng(12);
        const std::size_t paths = 1000000;
        std::vector<double> counts(nx * ny, 0.0);
        for (std::uint64_t p = 0; p < paths; ++p) {
            const PairSample s = simulate_pair(laws, n, rng, p);
            const double y = s.J - s.V;
            if (s.J < x_max && y < y_max) {
                counts[static_cast<std::size_t>(s.J / dx) * ny + static_cast<std::size_t>(y / dy)] += 1.0;
            }
        }
        double sup = 0.0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            sup = std::max(sup, std::fabs(counts[k] / paths - masses.values[k]) / (dx * dy));
        }
        discrepancy.push_back(sup);
    }
    o.detail << "refinement change " << change << " (peak density " << peak << "); sup |histogram - benchmark| N=20 "
             << discrepancy[0] << ", N=100 " << discrepancy[1];
    o.require(change < 1e-4, "contour refinement < 1e-4");
    o.require(discrepancy[1] < discrepancy[0], "N=100 closer than N=20");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"root residuals and brackets", criterion_1},
        {"Wiener-Hopf identity", criterion_2},
        {"atom cross-check", criterion_3},
        {"exact gamma-time law", criterion_4},
        {"martingale check", criterion_5},
        {"bias decay rate", criterion_6},
        {"pathwise orderings", criterion_7},
        {"jump augmentation", criterion_8},
        {"up-and-out pricing", criterion_9},
        {"atom and discontinuity", criterion_10},
        {"double no-touch bounds", criterion_11},
        {"joint density benchmark", criterion_12},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::printf("%s criterion %2zu (%s, %.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
