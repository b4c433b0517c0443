#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "whmc/baseline_mc.hpp"
#include "whmc/levy_models.hpp"

namespace whmc {

class ContinuationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ContourError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Factor law at complex rate: atom at zero plus sum_k w_k r_k exp(-r_k x).
struct ComplexFactor {
    cplx atom{0.0, 0.0};
    std::vector<cplx> rates;
    std::vector<cplx> weights;

    cplx cf(double theta) const;
    // mass of (x, infinity); survival(0) = 1 - atom
    cplx survival(double x) const;
    cplx density(double x) const;
};

struct ComplexFactorization {
    cplx lambda{0.0, 0.0};
    ComplexFactor sup;
    ComplexFactor inf;
    // signed roots of lambda + Psi(i z) = 0: negative real parts on the sup side
    std::vector<cplx> sup_roots;
    std::vector<cplx> inf_roots;
    // largest |lambda + Psi(i z)|; after polishing it is evaluated at the
    // extended-precision roots from which the weights are built
    double max_residual = 0.0;

    const ComplexFactor& factor(Side side) const { return side == Side::sup ? sup : inf; }
};

struct ContinuationOptions {
    double initial_step = 0.25;
    // largest step along the contour relative to |lambda|
    double max_relative_step = 0.1;
    std::size_t max_halvings = 40;
    std::size_t newton_iterations = 12;
    double newton_tol = 1e-13;
    // accepted relative step once Newton stops contracting
    double stall_tol = 1e-8;
    // Newton correction allowed relative to the predicted move of a root
    double max_move = 0.25;
};

// Tracks the roots along lambda0 + i direction u, u >= 0, starting from the
// real roots at lambda0.
class RootTracker {
public:
    RootTracker(const LevyModel& model, double lambda0, std::size_t K, ContinuationOptions opt = {},
                int direction = 1);

    void advance_to(double u);
    double height() const { return u_; }
    double lambda0() const { return lambda0_; }
    cplx lambda() const { return {lambda0_, direction_ * u_}; }
    std::size_t truncation() const { return K_; }
    // polish = true refines every root by Newton steps in extended precision
    // and reports the extended-precision residual
    ComplexFactorization factorization(bool polish = false) const;

private:
    bool try_step(double u_next);

    const LevyModel* model_;
    double lambda0_;
    std::size_t K_;
    ContinuationOptions opt_;
    double direction_;
    double u_ = 0.0;
    double step_;
    std::vector<cplx> sup_;
    std::vector<cplx> inf_;
    std::size_t sup_poles_ = 0;
    std::size_t inf_poles_ = 0;
};

// Factorization at lambda with Re(lambda) = lambda0, continued from the real
// anchor along the vertical line, roots polished in extended precision.
ComplexFactorization continue_factorization(const LevyModel& model, double lambda0, cplx lambda, std::size_t K,
                                            const ContinuationOptions& opt = {});

// Weights sum_{n<=n_poles} log(1 - r_k / P_n) - sum_{j != k} log(1 - r_k / r_j), exponentiated.
std::vector<cplx> complex_product_weights(const std::vector<cplx>& rates, const PoleLadder& poles,
                                          std::size_t n_poles);
std::vector<cplx> complex_product_weights(const std::vector<cplx_ext>& rates, const PoleLadder& poles,
                                          std::size_t n_poles);

// Density of X_t by Fourier inversion of exp(-t Psi), tabulated as cell
// averages (density = cell mass / dx).
IncrementTable marginal_density_xt(const LevyModel& model, double t, const IncrementGridSpec& grid = {});

// Contour lambda0 + i u. Panels of cubic Filon quadrature have widths growing
// geometrically so that `panels` of them reach reference_height; further
// panels of the same ratio are added until the tail estimate drops below
// tail_tolerance.
struct ContourSpec {
    double lambda0 = 0.0;           // 0 selects 2 / t
    std::size_t panels = 512;
    double reference_height = 0.0;  // 0 selects 1e5 / t
    double first_panel = 0.0;       // 0 selects (0.25 / t) (512 / panels), 0.05 for gamma times
    double min_height = 0.0;        // 0 selects 50 / t
    double max_height = 0.0;        // 0 selects 1e7 / t
    double tail_tolerance = 1e-8;
    std::size_t K = 128;
    ContinuationOptions continuation;
};

void to_json(nlohmann::json& j, const ContourSpec& c);

// Replaces exp(lambda t) by (rate / (rate - lambda))^n: the transform is then
// inverted at an independent Gamma(n, rate) time instead of a fixed time.
struct GammaTime {
    std::size_t n = 1;
    double rate = 1.0;
};

struct InversionReport {
    double lambda0 = 0.0;
    double height = 0.0;
    std::size_t panels = 0;
    std::size_t nodes = 0;
    double tail_estimate = 0.0;
    std::size_t K = 0;
    double max_residual = 0.0;
};

void to_json(nlohmann::json& j, const InversionReport& r);

// Fills out[0..n_out) with the Laplace transforms in t, at lambda, of the
// quantities to be recovered.
using LaplaceTransform = std::function<void(const ComplexFactorization&, cplx* out)>;

// (1 / 2 pi i) int exp(lambda t) L(lambda) d lambda for each output, using
// L(conj lambda) = conj L(lambda).
std::vector<double> bromwich_invert(const LevyModel& model, double t, std::size_t n_out,
                                    const LaplaceTransform& transform, const ContourSpec& spec = {},
                                    InversionReport* report = nullptr,
                                    const std::optional<GammaTime>& gamma = std::nullopt);

// Weights of int_a^{a+h} g(u) exp(i u t) du for g cubic through a + j h / 3.
std::array<cplx, 4> filon_cubic_weights(double a, double h, double t);

struct JointDensityGrid {
    std::vector<double> x;  // supremum axis
    std::vector<double> y;  // supremum minus terminal value
    std::vector<double> values;  // row-major, x outer
    double min_value = 0.0;
    InversionReport report;

    double at(std::size_t i, std::size_t j) const { return values[i * y.size() + j]; }
};

// Density of (sup X, sup X - X_t) on x > 0, y > 0.
JointDensityGrid joint_density(const LevyModel& model, double t, const std::vector<double>& x_grid,
                               const std::vector<double>& y_grid, const ContourSpec& spec = {});

// Probabilities of [x_i, x_{i+1}) x [y_j, y_{j+1}); a first edge at 0
// includes the atoms at 0.
JointDensityGrid joint_bin_masses(const LevyModel& model, double t, const std::vector<double>& x_edges,
                                  const std::vector<double>& y_edges, const ContourSpec& spec = {},
                                  const std::optional<GammaTime>& gamma = std::nullopt);

void write_joint_csv(std::ostream& os, const JointDensityGrid& grid);

// P(sup X = 0) at time t, or at a Gamma(n, rate) time.
double sup_atom_probability(const LevyModel& model, double t, const ContourSpec& spec = {},
                            const std::optional<GammaTime>& gamma = std::nullopt,
                            InversionReport* report = nullptr);

struct UpAndOutPayoff {
    double strike = 5.0;
    double barrier = std::numeric_limits<double>::infinity();
    double r = 0.0;
};

// exp(-r t) E[(s e^{X_t} - K)^+ 1{s e^{sup X} < b}] for every spot, from the
// joint law of (sup X, sup X - X_t).
std::vector<double> benchmark_up_and_out(const LevyModel& model, const UpAndOutPayoff& payoff,
                                         const std::vector<double>& spots, double t, const ContourSpec& spec = {},
                                         InversionReport* report = nullptr);

// Vanilla call by a single Fourier integral along Im theta = -1/2.
double lewis_call_price(const std::function<cplx(cplx)>& psi, double s, double strike, double r, double t);
double lewis_call_price(const LevyModel& model, double s, double strike, double r, double t);

}  // namespace whmc
