#include "doctest.h"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "test_models.hpp"
#include "whmc/fourier_engine.hpp"
#include "whmc/wh_factorization.hpp"

using namespace whmc;

namespace {

double wh_error(const ComplexFactorization& f, const LevyModel& m) {
    double err = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double th = -10.0 + 0.5 * i;
        const cplx exact = f.lambda / (f.lambda + m.psi(cplx(th, 0.0)));
        err = std::max(err, std::abs(f.sup.cf(th) * f.inf.cf(-th) - exact) / std::abs(exact));
    }
    return err;
}

// contour with few roots, for transforms that do not use the factorization
ContourSpec light_contour() {
    ContourSpec c;
    c.K = 8;
    return c;
}

double black_scholes_call(double s, double k, double r, double sigma, double t) {
    boost::math::normal_distribution<double> n;
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma * sigma) * t) / (sigma * std::sqrt(t));
    const double d2 = d1 - sigma * std::sqrt(t);
    return s * boost::math::cdf(n, d1) - k * std::exp(-r * t) * boost::math::cdf(n, d2);
}

}  // namespace

TEST_CASE("real anchor of the continuation reproduces the real factorization") {
    for (const LevyModel& m : {testing::set1(), testing::set2()}) {
        const RootTracker tracker(m, 2.0, 128);
        const ComplexFactorization f = tracker.factorization();
        const RootLadder ladder = locate_roots(m, 2.0, 128);
        for (std::size_t k = 0; k < ladder.minus_roots.size(); ++k) {
            CHECK(std::abs(f.sup_roots[k] - cplx(static_cast<double>(ladder.minus_roots[k]), 0.0)) <
                  1e-10 * (1.0 + std::fabs(static_cast<double>(ladder.minus_roots[k]))));
            CHECK(std::abs(f.inf_roots[k] - cplx(static_cast<double>(ladder.plus_roots[k]), 0.0)) <
                  1e-10 * (1.0 + static_cast<double>(ladder.plus_roots[k])));
        }
        const FactorLaw sup = factor_coefficients(ladder, m, Side::sup);
        const FactorLaw inf = factor_coefficients(ladder, m, Side::inf);
        CHECK(std::fabs(f.sup.atom.real() - sup.atom0()) < 1e-10);
        CHECK(std::fabs(f.inf.atom.real() - inf.atom0()) < 1e-10);
        for (std::size_t k = 0; k < sup.weights().size(); ++k) {
            CHECK(std::abs(f.sup.weights[k] - sup.weights()[k]) < 1e-10);
            CHECK(std::abs(f.inf.weights[k] - inf.weights()[k]) < 1e-10);
        }
    }
}

TEST_CASE("continued factorization satisfies the Wiener-Hopf identity at complex lambda") {
    const LevyModel m = testing::set1();
    RootTracker tracker(m, 2.0, 128);
    for (double u : {1.0, 40.0, 900.0, 2.0e4}) {
        tracker.advance_to(u);
        CHECK(wh_error(tracker.factorization(), m) < 1e-4);
    }
}

TEST_CASE("continued roots have small residuals after polishing") {
    for (const LevyModel& m : {testing::set1(), testing::set2()}) {
        for (double u : {3.0, 500.0, 1.0e4}) {
            const ComplexFactorization f = continue_factorization(m, 2.0, cplx(2.0, u), 128);
            CHECK(f.max_residual < 1e-9);
        }
        // further up the residual is limited by the conditioning near the poles
        const ComplexFactorization f = continue_factorization(m, 2.0, cplx(2.0, 3.0e4), 128);
        CHECK(f.max_residual < 1e-11 * std::abs(f.lambda));
    }
    CHECK_THROWS_AS(continue_factorization(testing::set1(), 2.0, cplx(1.0, 3.0), 16), std::invalid_argument);
}

TEST_CASE("continuation to the conjugate point gives the conjugate factorization") {
    const LevyModel m = testing::set2();
    for (double u : {0.7, 60.0, 5.0e3}) {
        const ComplexFactorization up = continue_factorization(m, 1.5, cplx(1.5, u), 64);
        const ComplexFactorization down = continue_factorization(m, 1.5, cplx(1.5, -u), 64);
        for (std::size_t k = 0; k < up.sup_roots.size(); ++k) {
            CHECK(std::abs(up.sup_roots[k] - std::conj(down.sup_roots[k])) < 1e-9 * (1.0 + std::abs(up.sup_roots[k])));
            CHECK(std::abs(up.inf_roots[k] - std::conj(down.inf_roots[k])) < 1e-9 * (1.0 + std::abs(up.inf_roots[k])));
        }
        CHECK(std::abs(up.sup.atom - std::conj(down.sup.atom)) < 1e-9);
        CHECK(std::abs(up.sup.survival(0.3) - std::conj(down.sup.survival(0.3))) < 1e-9);
    }
}

TEST_CASE("Filon weights integrate cubics against the oscillatory factor exactly") {
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    const auto p = [](double u) { return 0.3 - 1.2 * u + 0.7 * u * u + 0.05 * u * u * u; };
    for (double t : {0.01, 1.0, 35.0}) {
        const double a = 1.3, h = 0.9;
        const auto w = filon_cubic_weights(a, h, t);
        cplx q(0.0, 0.0);
        for (int j = 0; j < 4; ++j) {
            q += w[j] * p(a + h * j / 3.0);
        }
        const double re = gk::integrate([&](double u) { return p(u) * std::cos(u * t); }, a, a + h, 0, 1e-14);
        const double im = gk::integrate([&](double u) { return p(u) * std::sin(u * t); }, a, a + h, 0, 1e-14);
        CHECK(std::abs(q - cplx(re, im)) < 1e-12);
    }
}

TEST_CASE("Bromwich inversion recovers elementary transforms") {
    const LevyModel m = testing::set1();
    const double t = 1.3, a = 0.7;
    const auto transform = [&](const ComplexFactorization& f, cplx* out) {
        out[0] = 1.0 / (f.lambda + a);
        out[1] = 1.0 / ((f.lambda + a) * (f.lambda + a));
        out[2] = 1.0 / (f.lambda * f.lambda);
    };
    ContourSpec spec = light_contour();
    spec.tail_tolerance = 1e-6;
    spec.max_height = 1e9;
    InversionReport rep;
    const auto v = bromwich_invert(m, t, 3, transform, spec, &rep);
    CHECK(v[0] == doctest::Approx(std::exp(-a * t)).epsilon(1e-5));
    CHECK(v[1] == doctest::Approx(t * std::exp(-a * t)).epsilon(1e-5));
    CHECK(v[2] == doctest::Approx(t).epsilon(1e-5));
    CHECK(rep.tail_estimate < 1e-6);
    CHECK(rep.lambda0 == doctest::Approx(2.0 / t));

    // at a Gamma(n, rate) time: E[exp(-a T)] = (rate / (rate + a))^n
    const auto fast = [&](const ComplexFactorization& f, cplx* out) { out[0] = 1.0 / (f.lambda + a); };
    const GammaTime g{20, 20.0 / t};
    ContourSpec gs = light_contour();
    gs.tail_tolerance = 1e-9;
    const double gv = bromwich_invert(m, t, 1, fast, gs, nullptr, g)[0];
    CHECK(std::fabs(gv - std::pow(g.rate / (g.rate + a), 20)) < 1e-8);
}

TEST_CASE("contour that cannot converge raises a contour error") {
    const auto slow = [](const ComplexFactorization& f, cplx* out) { out[0] = 1.0 / std::sqrt(f.lambda); };
    ContourSpec spec = light_contour();
    spec.max_height = 1e4;
    CHECK_THROWS_AS(bromwich_invert(testing::set1(), 1.0, 1, slow, spec), ContourError);
}

TEST_CASE("Lewis call formula reproduces Black-Scholes") {
    const double sigma = 0.3, r = 0.04;
    const auto psi = [&](cplx th) { return cplx(0.0, -(r - 0.5 * sigma * sigma)) * th + 0.5 * sigma * sigma * th * th; };
    for (double s : {3.0, 5.0, 8.0}) {
        for (double t : {0.25, 1.0}) {
            CHECK(lewis_call_price(psi, s, 5.0, r, t) == doctest::Approx(black_scholes_call(s, 5.0, r, sigma, t)).epsilon(1e-9));
        }
    }
}

TEST_CASE("benchmark up-and-out price tends to the vanilla call as the barrier recedes") {
    const LevyModel m = testing::set1();
    UpAndOutPayoff payoff;
    payoff.strike = 5.0;
    payoff.r = 0.05;
    const std::vector<double> spots{3.0, 5.0, 7.0};
    const auto vanilla = benchmark_up_and_out(m, payoff, spots, 1.0);
    for (std::size_t i = 0; i < spots.size(); ++i) {
        CHECK(vanilla[i] == doctest::Approx(lewis_call_price(m, spots[i], 5.0, 0.05, 1.0)).epsilon(1e-5));
    }
    payoff.barrier = 6.0;
    // knocked out at inception, and never in the money below the barrier
    const auto dead = benchmark_up_and_out(m, payoff, {6.0, 6.5}, 1.0);
    CHECK(dead[0] == 0.0);
    CHECK(dead[1] == 0.0);
    payoff.strike = 6.0;
    CHECK(benchmark_up_and_out(m, payoff, {4.0}, 1.0)[0] == 0.0);
}

TEST_CASE("joint bin masses form a probability distribution consistent with the density") {
    const LevyModel m = testing::set1();
    const std::vector<double> xe{0.0, 0.2, 0.5, 1.0, INFINITY};
    const std::vector<double> ye{0.0, 0.3, 1.0, INFINITY};
    const JointDensityGrid bins = joint_bin_masses(m, 1.0, xe, ye);
    double total = 0.0;
    for (double v : bins.values) {
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bins.min_value > 0.0);

    // mass of [0.2, 0.5) x [0.3, 1.0) by integrating the density
    std::vector<double> xs, ys;
    const std::size_t n = 24;
    for (std::size_t i = 0; i < n; ++i) {
        xs.push_back(0.2 + 0.3 * (i + 0.5) / n);
        ys.push_back(0.3 + 0.7 * (i + 0.5) / n);
    }
    const JointDensityGrid dens = joint_density(m, 1.0, xs, ys);
    double integral = 0.0;
    for (double v : dens.values) {
        integral += v * (0.3 / n) * (0.7 / n);
    }
    CHECK(integral == doctest::Approx(bins.values[1 * 3 + 1]).epsilon(2e-3));
    CHECK(dens.min_value > 0.0);

    std::ostringstream os;
    write_joint_csv(os, bins);
    CHECK(os.str().rfind("x_lo,x_hi,y_lo,y_hi,mass\n", 0) == 0);
}

TEST_CASE("supremum atom at a gamma time with one step equals the factor atom") {
    const LevyModel m = testing::set2();
    const double lambda = 3.0;
    const FactorizationPair pair = build_factorization(m, lambda, {.K = 128, .build_samplers = false});
    ContourSpec spec;
    spec.K = 128;
    const double p = sup_atom_probability(m, 1.0, spec, GammaTime{1, lambda});
    CHECK(p == doctest::Approx(pair.sup_law.atom0()).epsilon(1e-6));
    CHECK(std::fabs(sup_atom_probability(testing::set1(), 1.0, spec)) < 1e-6);
}

TEST_CASE("marginal density of X_t has the cumulants of the exponent") {
    const LevyModel m = testing::set1();
    const IncrementTable table = marginal_density_xt(m, 1.0);
    double mass = 0.0;
    for (double v : table.cell_mass()) {
        mass += v;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(table.mean() == doctest::Approx(increment_mean(m, 1.0)).epsilon(1e-6));
}
