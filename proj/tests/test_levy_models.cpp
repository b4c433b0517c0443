#include "doctest.h"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <functional>

#include "test_models.hpp"
#include "whmc/levy_models.hpp"

using namespace whmc;

namespace {

using boost::math::quadrature::gauss_kronrod;

// integrands below this distance from the origin contribute nothing measurable
constexpr double kTiny = 1e-60;

double integrate(const std::function<double(double)>& f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// int_a^b f over a range with an integrable endpoint singularity at a
double integrate_singular(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-13);
}

// int (1 - e^{i theta x}) pi(x) dx over the whole line, split at +-1
cplx jump_part(const std::function<double(double)>& dens, double theta, double x_max) {
    const auto re = [&](double x) { return std::fabs(x) < kTiny ? 0.0 : 2.0 * std::pow(std::sin(theta * x / 2.0), 2) * dens(x); };
    const auto im = [&](double x) { return std::fabs(x) < kTiny ? 0.0 : -std::sin(theta * x) * dens(x); };
    const auto re_neg = [&](double x) { return re(-x); };
    const auto im_neg = [&](double x) { return im(-x); };
    double r = integrate_singular(re, 0.0, 1.0) + integrate(re, 1.0, x_max) + integrate_singular(re_neg, 0.0, 1.0) +
               integrate(re_neg, 1.0, x_max);
    double i = integrate_singular(im, 0.0, 1.0) + integrate(im, 1.0, x_max) + integrate_singular(im_neg, 0.0, 1.0) +
               integrate(im_neg, 1.0, x_max);
    return {r, i};
}

// int (1 - e^{i theta x} + i theta x) pi(x) dx over the whole line
cplx compensated_jump_part(const std::function<double(double)>& dens, double theta, double x_max) {
    const auto re = [&](double x) { return std::fabs(x) < kTiny ? 0.0 : 2.0 * std::pow(std::sin(theta * x / 2.0), 2) * dens(x); };
    const auto im = [&](double x) { return std::fabs(x) < kTiny ? 0.0 : (theta * x - std::sin(theta * x)) * dens(x); };
    const auto re_neg = [&](double x) { return re(-x); };
    const auto im_neg = [&](double x) { return im(-x); };
    double r = integrate_singular(re, 0.0, 1.0) + integrate(re, 1.0, x_max) + integrate_singular(re_neg, 0.0, 1.0) +
               integrate(re_neg, 1.0, x_max);
    double i = integrate_singular(im, 0.0, 1.0) + integrate(im, 1.0, x_max) + integrate_singular(im_neg, 0.0, 1.0) +
               integrate(im_neg, 1.0, x_max);
    return {r, i};
}

}  // namespace

TEST_CASE("parameter ranges are enforced") {
    BetaFamilyParams p = testing::set1_params();
    CHECK_NOTHROW(LevyModel::beta_family(p));
    p.lambda1 = 2.0 + 5e-10;
    CHECK_THROWS_AS(LevyModel::beta_family(p), ParameterError);
    p.lambda1 = 3.0;
    CHECK_THROWS_AS(LevyModel::beta_family(p), ParameterError);
    p = testing::set1_params();
    p.c2 = 0.0;
    CHECK_THROWS_AS(LevyModel::beta_family(p), ParameterError);
    p = testing::set1_params();
    p.sigma = -0.1;
    CHECK_THROWS_AS(LevyModel::beta_family(p), ParameterError);

    HypergeometricParams h = testing::hyper_params_full();
    CHECK_NOTHROW(LevyModel::hypergeometric(h));
    h.sub2.beta = 1.25;
    CHECK_THROWS_AS(LevyModel::hypergeometric(h), ParameterError);
    h = testing::hyper_params_full();
    h.sub1.kappa = 0.1;
    h.sub2.kappa = 0.2;
    CHECK_THROWS_AS(LevyModel::hypergeometric(h), ParameterError);
    h = testing::hyper_params_full();
    h.sub1.alpha = 1.0 + h.sub1.gamma;
    CHECK_THROWS_AS(LevyModel::hypergeometric(h), ParameterError);
}

TEST_CASE("classification flags") {
    BetaFamilyParams p = testing::set2_params();
    CHECK(p.bounded_variation());
    CHECK(p.infinite_activity());
    p.sigma = 0.4;
    CHECK_FALSE(p.bounded_variation());
    p.sigma = 0.0;
    p.lambda2 = 2.5;
    CHECK_FALSE(p.bounded_variation());
    p.lambda1 = 0.5;
    CHECK_FALSE(p.infinite_activity());
}

TEST_CASE("exponent vanishes at zero and has Hermitian symmetry with nonnegative real part") {
    for (const LevyModel& m : {testing::set1(), testing::set2(), testing::hyper_full(), testing::hyper_compound()}) {
        CHECK(std::abs(m.psi(cplx(0.0, 0.0))) < 1e-14);
        for (double th = -30.0; th <= 30.0; th += 0.73) {
            const cplx a = m.psi(cplx(th, 0.0));
            const cplx b = m.psi(cplx(-th, 0.0));
            CHECK(std::abs(a - std::conj(b)) <= 1e-12 * (1.0 + std::abs(a)));
            CHECK(a.real() >= -1e-12);
        }
    }
}

TEST_CASE("double and extended precision exponents agree") {
    for (const LevyModel& m : {testing::set1(), testing::set2(), testing::hyper_full(), testing::hyper_compound()}) {
        for (const cplx th : {cplx(0.7, 0.0), cplx(-3.0, -0.4), cplx(25.0, 0.3), cplx(2.0e3, -0.2), cplx(0.0, -0.9),
                              cplx(-4.0e4, 0.6)}) {
            const cplx_ext te(th.real(), th.imag());
            const cplx a = m.psi(th);
            const cplx_ext b = m.psi(te);
            const cplx da = m.dpsi(th);
            const cplx_ext db = m.dpsi(te);
            CHECK(std::abs(a - cplx(static_cast<double>(b.real()), static_cast<double>(b.imag()))) <=
                  1e-10 * (1.0 + std::abs(a)));
            CHECK(std::abs(da - cplx(static_cast<double>(db.real()), static_cast<double>(db.imag()))) <=
                  1e-9 * (1.0 + std::abs(da)));
        }
    }
}

TEST_CASE("calibrated Set 1 satisfies Psi(-i) = -r") {
    const LevyModel m = testing::set1();
    const cplx_ext v = m.psi(cplx_ext(0.0L, -1.0L));
    CHECK(std::fabs(static_cast<double>(v.real()) + 0.05) < 1e-12);
    CHECK(std::fabs(static_cast<double>(v.imag())) < 1e-12);
    const LevyModel m2 = testing::set2();
    CHECK(std::fabs(static_cast<double>(m2.psi(cplx_ext(0.0L, -1.0L)).real()) + 0.05) < 1e-12);

    // drift enters linearly, so calibration is a = -r - Psi_0(-i)
    HypergeometricParams h = testing::hyper_params_compound();
    h.d = 0.0;
    const LevyModel base = LevyModel::hypergeometric(h);
    const double psi0 = static_cast<double>(base.psi(cplx_ext(0.0L, -1.0L)).real());
    const LevyModel recal = calibrate_risk_neutral_drift(base.with_drift(3.0), 0.0);
    CHECK(recal.drift() == doctest::Approx(-psi0).epsilon(1e-14));
    CHECK(std::fabs(static_cast<double>(recal.psi(cplx_ext(0.0L, -1.0L)).real())) < 1e-13);

    BetaFamilyParams bad = testing::set1_params();
    bad.alpha1 = 0.5;
    CHECK_THROWS_AS(calibrate_risk_neutral_drift(LevyModel::beta_family(bad), 0.05), CalibrationError);
}

TEST_CASE("beta exponent agrees with quadrature of the Levy-Khinchine integral") {
    for (const BetaFamilyParams& p : {testing::set1_params(), testing::set2_params()}) {
        const auto dens = [&](double x) { return levy_density_beta(p, x); };
        for (double th : {0.5, 1.0, 2.0, 5.0}) {
            const cplx oracle = cplx(0.0, p.a * th) + 0.5 * p.sigma * p.sigma * th * th + jump_part(dens, th, 60.0);
            const cplx val = psi_beta(p, cplx(th, 0.0));
            CHECK(std::abs(val - oracle) < 1e-6 * std::abs(oracle));
        }
    }
}

TEST_CASE("beta exponent with index above 2 differs from the compensated integral by a linear drift") {
    BetaFamilyParams p = testing::set1_params();
    p.lambda1 = 2.4;
    p.lambda2 = 2.2;
    const auto dens = [&](double x) { return levy_density_beta(p, x); };
    double slope0 = 0.0;
    for (double th : {0.5, 1.0, 2.0, 5.0}) {
        const cplx diff = psi_beta(p, cplx(th, 0.0)) - 0.5 * p.sigma * p.sigma * th * th -
                          compensated_jump_part(dens, th, 60.0);
        CHECK(std::fabs(diff.real()) < 1e-6 * std::abs(diff));
        const double slope = diff.imag() / th;
        if (th == 0.5) {
            slope0 = slope;
        }
        CHECK(slope == doctest::Approx(slope0).epsilon(1e-7));
    }
}

TEST_CASE("beta Levy density examples") {
    const BetaFamilyParams p = testing::set1_params();
    CHECK(levy_density_beta(p, 1.0) == doctest::Approx(std::exp(-1.5) / std::pow(1.0 - std::exp(-1.5), 1.5)));
    for (double x : {1e-3, 1e-4, 1e-5}) {
        // (1 - e^{-bx})^{-l} = (bx)^{-l} (1 + l b x / 2 + O(x^2))
        const double lead = p.c1 * std::pow(p.beta1 * x, -p.lambda1) * (1.0 + p.lambda1 * p.beta1 * x / 2.0) *
                            std::exp(-p.alpha1 * p.beta1 * x);
        CHECK(levy_density_beta(p, x) == doctest::Approx(lead).epsilon(5.0 * x * x));
    }
    for (double x : {0.1, 0.7, 3.0}) {
        CHECK(levy_density_beta(p, x) == doctest::Approx(levy_density_beta(p, -x)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(levy_density_beta(p, 0.0), std::domain_error);
}

TEST_CASE("beta subordinator Laplace exponent") {
    BetaSubordinatorParams s{0.7, 0.4, 1.3, 0.35, 0.0, 0.0};
    CHECK(phi_beta_subordinator(s, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    const auto mu = [&](double x) {
        return s.c * std::exp(s.alpha * s.beta * x - (1.0 + s.gamma) * std::log(std::expm1(s.beta * x)));
    };
    for (double th : {0.3, 1.0, 4.0}) {
        const auto f = [&](double x) { return x < kTiny ? 0.0 : -std::expm1(-th * x) * mu(x); };
        const double oracle = integrate_singular(f, 0.0, 1.0) + integrate(f, 1.0, 200.0);
        CHECK(phi_beta_subordinator(s, th) == doctest::Approx(oracle).epsilon(1e-9));
    }
    s.kappa = 0.25;
    s.delta = 0.1;
    CHECK(phi_beta_subordinator(s, 0.0) == doctest::Approx(0.25));
    double prev = phi_beta_subordinator(s, 0.0);
    for (double th = 0.25; th < 20.0; th += 0.25) {
        const double v = phi_beta_subordinator(s, th);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("hypergeometric exponent basics") {
    const HypergeometricParams h = testing::hyper_params_full();
    CHECK(std::abs(psi_hypergeometric(h, cplx(0.0, 0.0))) < 1e-15);

    // quadratic growth coefficient is (sigma^2 + 2 delta1 delta2) / 2 ; with negative gammas the
    // remainder decays fast enough to read the coefficient off directly
    HypergeometricParams g = h;
    g.sub1.gamma = -0.5;
    g.sub1.alpha = 0.2;
    g.sub2.gamma = -0.6;
    g.sub2.alpha = 0.1;
    const double coeff = 0.5 * (g.sigma * g.sigma + 2.0 * g.sub1.delta * g.sub2.delta);
    for (double th : {1e3, 3e3, 1e4}) {
        const double ratio = std::abs(psi_hypergeometric(g, cplx(th, 0.0))) / (th * th);
        CHECK(ratio == doctest::Approx(coeff).epsilon(2e-3 * 1e3 / th));
    }
    CHECK(effective_gaussian_variance(LevyModel::hypergeometric(g)) ==
          doctest::Approx(g.sigma * g.sigma + 2.0 * g.sub1.delta * g.sub2.delta));

    // positive gammas: fit ratio = A + B theta^{gmax - 1} over [1e3, 1e4]
    const double gmax = std::max(h.sub1.gamma, h.sub2.gamma);
    const double t1 = 1e3, t2 = 1e4;
    const double r1 = std::abs(psi_hypergeometric(h, cplx(t1, 0.0))) / (t1 * t1);
    const double r2 = std::abs(psi_hypergeometric(h, cplx(t2, 0.0))) / (t2 * t2);
    const double e1 = std::pow(t1, gmax - 1.0), e2 = std::pow(t2, gmax - 1.0);
    const double a_fit = (r1 * e2 - r2 * e1) / (e2 - e1);
    const double coeff_h = 0.5 * (h.sigma * h.sigma + 2.0 * h.sub1.delta * h.sub2.delta);
    CHECK(a_fit == doctest::Approx(coeff_h).epsilon(2e-3));
}

TEST_CASE("hypergeometric exponent of a compound Poisson difference matches Levy-Khinchine quadrature") {
    const HypergeometricParams h = testing::hyper_params_compound();
    const auto dens = [&](double x) {
        if (std::fabs(x) < 1e-8) {
            return 0.0;
        }
        return levy_density_hypergeometric(h, x);
    };
    for (double th : {0.5, 1.0, 2.0, 5.0}) {
        const cplx oracle = cplx(0.0, h.d * th) + jump_part(dens, th, 80.0);
        const cplx val = psi_hypergeometric(h, cplx(th, 0.0));
        CHECK(std::abs(val - oracle) < 1e-6 * std::abs(oracle));
    }
}

TEST_CASE("hypergeometric Levy density matches the ladder-convolution identity") {
    for (const HypergeometricParams& h : {testing::hyper_params_full(), testing::hyper_params_compound()}) {
        for (int sign : {1, -1}) {
            const BetaSubordinatorParams& s1 = sign > 0 ? h.sub1 : h.sub2;
            const BetaSubordinatorParams& s2 = sign > 0 ? h.sub2 : h.sub1;
            const double b = s1.beta;
            const auto pi1 = [&](double x) {
                return s1.c * std::exp(s1.alpha * b * x - (1.0 + s1.gamma) * std::log(std::expm1(b * x)));
            };
            const auto dpi1 = [&](double x) {
                const double em1 = std::expm1(b * x);
                return b * pi1(x) * (s1.alpha - (1.0 + s1.gamma) * (em1 + 1.0) / em1);
            };
            const auto pi2 = [&](double u) {
                return s2.c * std::exp(s2.alpha * b * u - (1.0 + s2.gamma) * std::log(std::expm1(b * u)));
            };
            const auto tail2 = [&](double u) {
                return integrate_singular(pi2, u, u + 1.0) + integrate(pi2, u + 1.0, u + 200.0);
            };
            for (double x : {0.3, 1.0, 2.5}) {
                const auto inner = [&](double u) { return u < kTiny ? 0.0 : -dpi1(x + u) * tail2(u); };
                const double conv = integrate_singular(inner, 0.0, 1.0) + integrate(inner, 1.0, 60.0);
                const double oracle = conv - s2.delta * dpi1(x) + s2.kappa * pi1(x);
                const double val = levy_density_hypergeometric(h, sign * x);
                CHECK(val == doctest::Approx(oracle).epsilon(1e-7));
                CHECK(val > 0.0);
            }
        }
    }
}

TEST_CASE("hypergeometric density decays at the leading exponential rate") {
    const HypergeometricParams h = testing::hyper_params_full();
    const double x1 = 20.0, x2 = 25.0;
    const double slope = std::log(levy_density_hypergeometric(h, x2) / levy_density_hypergeometric(h, x1)) / (x2 - x1);
    const double rate = h.sub1.beta * (1.0 + h.sub1.gamma - h.sub1.alpha);
    CHECK(-slope == doctest::Approx(rate).epsilon(1e-6));
}

TEST_CASE("hypergeometric density vanishes with the descending ladder measure") {
    HypergeometricParams h = testing::hyper_params_full();
    h.sub2.delta = 0.0;
    h.sub2.kappa = 0.0;
    double prev = 1e300;
    for (double c2 : {1e-2, 1e-4, 1e-6}) {
        h.sub2.c = c2;
        const double v = levy_density_hypergeometric(h, 0.8);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-5);
}
