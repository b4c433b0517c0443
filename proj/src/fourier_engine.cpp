#include "whmc/fourier_engine.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "whmc/wh_factorization.hpp"

namespace whmc {

namespace {

using cld = std::complex<long double>;

// lambda + Psi(i z) and its derivative in z
cplx root_function(const LevyModel& m, cplx lambda, cplx z) { return lambda + m.psi(cplx(-z.imag(), z.real())); }
cplx root_derivative(const LevyModel& m, cplx z) { return cplx(0.0, 1.0) * m.dpsi(cplx(-z.imag(), z.real())); }

std::size_t numerator_poles(const std::vector<long double>& magnitudes, const PoleLadder& poles) {
    const std::size_t K = magnitudes.size() - 1;
    const long double lo = poles.pole(K);
    const long double hi = poles.pole(K + 1);
    return (magnitudes[K] - lo) / (hi - lo) > 0.5L ? K + 1 : K;
}

ComplexFactor make_factor(const std::vector<cld>& rates, const PoleLadder& poles, std::size_t n_poles) {
    ComplexFactor f;
    f.rates.assign(rates.begin(), rates.end());
    f.weights = complex_product_weights(rates, poles, n_poles);
    cplx sum(0.0, 0.0);
    for (const auto& w : f.weights) {
        sum += w;
    }
    f.atom = 1.0 - sum;
    return f;
}

}  // namespace

cplx ComplexFactor::cf(double theta) const {
    cplx out = atom;
    const cplx it(0.0, theta);
    for (std::size_t k = 0; k < rates.size(); ++k) {
        out += weights[k] * rates[k] / (rates[k] - it);
    }
    return out;
}

cplx ComplexFactor::survival(double x) const {
    if (x < 0.0) {
        throw std::domain_error("complex factor survival: x < 0");
    }
    if (x == 0.0) {
        return 1.0 - atom;
    }
    cplx out(0.0, 0.0);
    for (std::size_t k = 0; k < rates.size(); ++k) {
        out += weights[k] * std::exp(-rates[k] * x);
    }
    return out;
}

cplx ComplexFactor::density(double x) const {
    if (x < 0.0) {
        throw std::domain_error("complex factor density: x < 0");
    }
    cplx out(0.0, 0.0);
    for (std::size_t k = 0; k < rates.size(); ++k) {
        out += weights[k] * rates[k] * std::exp(-rates[k] * x);
    }
    return out;
}

std::vector<cplx> complex_product_weights(const std::vector<cplx_ext>& rates, const PoleLadder& poles,
                                          std::size_t n_poles) {
    const std::size_t n = rates.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cld rk = rates[k];
        cld num(1.0L, 0.0L);
        for (std::size_t j = 1; j <= n_poles; ++j) {
            num *= 1.0L - rk / poles.pole(j);
        }
        cld den(1.0L, 0.0L);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) {
                continue;
            }
            const cld term = 1.0L - rk / rates[j];
            if (std::abs(term) < 1e-15L) {
                throw DegeneracyError("complex factor: coincident roots at indices " + std::to_string(k) + " and " +
                                      std::to_string(j));
            }
            den *= term;
        }
        const cld w = num / den;
        out[k] = cplx(static_cast<double>(w.real()), static_cast<double>(w.imag()));
    }
    return out;
}

std::vector<cplx> complex_product_weights(const std::vector<cplx>& rates, const PoleLadder& poles,
                                          std::size_t n_poles) {
    std::vector<cplx_ext> ext(rates.begin(), rates.end());
    return complex_product_weights(ext, poles, n_poles);
}

RootTracker::RootTracker(const LevyModel& model, double lambda0, std::size_t K, ContinuationOptions opt,
                         int direction)
    : model_(&model), lambda0_(lambda0), K_(K), opt_(opt), direction_(direction < 0 ? -1.0 : 1.0),
      step_(opt.initial_step) {
    if (!(lambda0 > 0.0)) {
        throw std::invalid_argument("root tracker: lambda0 must be > 0");
    }
    const RootLadder ladder = locate_roots(model, lambda0, K);
    std::vector<long double> mag_sup, mag_inf;
    for (long double z : ladder.minus_roots) {
        sup_.emplace_back(static_cast<double>(z), 0.0);
        mag_sup.push_back(-z);
    }
    for (long double z : ladder.plus_roots) {
        inf_.emplace_back(static_cast<double>(z), 0.0);
        mag_inf.push_back(z);
    }
    sup_poles_ = numerator_poles(mag_sup, model.poles(Side::sup));
    inf_poles_ = numerator_poles(mag_inf, model.poles(Side::inf));
}

bool RootTracker::try_step(double u_next) {
    const cplx lambda(lambda0_, direction_ * u_next);
    const cplx dlambda(0.0, direction_ * (u_next - u_));
    std::vector<cplx> next_sup(sup_.size()), next_inf(inf_.size());
    const auto advance = [&](const std::vector<cplx>& from, std::vector<cplx>& to) {
        for (std::size_t k = 0; k < from.size(); ++k) {
            const cplx z0 = from[k];
            const cplx predicted = z0 - dlambda / root_derivative(*model_, z0);
            cplx z = predicted;
            bool converged = false;
            double last = std::numeric_limits<double>::infinity();
            for (std::size_t it = 0; it < opt_.newton_iterations; ++it) {
                const cplx d = root_function(*model_, lambda, z) / root_derivative(*model_, z);
                z -= d;
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                    return false;
                }
                const double scale = 1.0 + std::abs(z);
                // far from the origin the exponent's rounding noise can exceed
                // newton_tol; a step that no longer contracts is at that floor
                if (std::abs(d) <= opt_.newton_tol * scale ||
                    (std::abs(d) <= opt_.stall_tol * scale && std::abs(d) > 0.5 * last)) {
                    converged = true;
                    break;
                }
                last = std::abs(d);
            }
            // the corrector must stay small against the predicted move, otherwise
            // Newton may have jumped to another root
            const double move = std::abs(predicted - z0);
            if (!converged || std::abs(z - predicted) > opt_.max_move * move + 1e-9 * (1.0 + std::abs(z0))) {
                return false;
            }
            to[k] = z;
        }
        for (std::size_t i = 0; i < to.size(); ++i) {
            for (std::size_t j = i + 1; j < to.size(); ++j) {
                if (std::abs(to[i] - to[j]) < 1e-8 * (1.0 + std::abs(to[i]))) {
                    return false;
                }
            }
        }
        return true;
    };
    if (!advance(sup_, next_sup) || !advance(inf_, next_inf)) {
        return false;
    }
    sup_.swap(next_sup);
    inf_.swap(next_inf);
    return true;
}

void RootTracker::advance_to(double u) {
    if (u < u_) {
        throw std::invalid_argument("root tracker: contour height must not decrease");
    }
    std::size_t halvings = 0;
    while (u_ < u) {
        const double cap = opt_.max_relative_step * std::abs(cplx(lambda0_, u_)) + opt_.initial_step;
        const double h = std::min({step_, cap, u - u_});
        const double target = (u - u_ - h <= 1e-12 * u) ? u : u_ + h;
        if (try_step(target)) {
            u_ = target;
            step_ = std::min(step_ * 1.5, cap);
            halvings = 0;
        } else {
            step_ = 0.5 * h;
            if (++halvings > opt_.max_halvings) {
                throw ContinuationError("root continuation failed near lambda = " + std::to_string(lambda0_) +
                                        " + " + std::to_string(u_) + "i");
            }
        }
    }
}

ComplexFactorization RootTracker::factorization(bool polish) const {
    ComplexFactorization f;
    f.lambda = lambda();
    std::vector<cld> sup(sup_.begin(), sup_.end());
    std::vector<cld> inf(inf_.begin(), inf_.end());
    if (polish) {
        const cld lam(f.lambda.real(), f.lambda.imag());
        const cld i(0.0L, 1.0L);
        for (auto* roots : {&sup, &inf}) {
            for (auto& w : *roots) {
                for (int it = 0; it < 3; ++it) {
                    const cld th = i * w;
                    w -= (lam + model_->psi(th)) / (i * model_->dpsi(th));
                }
                const double res = static_cast<double>(std::abs(lam + model_->psi(cld(i * w))));
                f.max_residual = std::max(f.max_residual, res);
            }
        }
    } else {
        for (const auto* roots : {&sup_, &inf_}) {
            for (const auto& z : *roots) {
                f.max_residual = std::max(f.max_residual, std::abs(root_function(*model_, f.lambda, z)));
            }
        }
    }
    f.sup_roots.assign(sup.begin(), sup.end());
    f.inf_roots.assign(inf.begin(), inf.end());
    std::vector<cld> rates(sup.size());
    for (std::size_t k = 0; k < rates.size(); ++k) {
        rates[k] = -sup[k];
    }
    f.sup = make_factor(rates, model_->poles(Side::sup), sup_poles_);
    f.inf = make_factor(inf, model_->poles(Side::inf), inf_poles_);
    return f;
}

ComplexFactorization continue_factorization(const LevyModel& model, double lambda0, cplx lambda, std::size_t K,
                                            const ContinuationOptions& opt) {
    if (std::fabs(lambda.real() - lambda0) > 1e-12 * (1.0 + lambda0)) {
        throw std::invalid_argument("continue_factorization: Re(lambda) must equal lambda0");
    }
    RootTracker tracker(model, lambda0, K, opt, lambda.imag() < 0.0 ? -1 : 1);
    tracker.advance_to(std::fabs(lambda.imag()));
    return tracker.factorization(true);
}

IncrementTable marginal_density_xt(const LevyModel& model, double t, const IncrementGridSpec& grid) {
    return build_increment_table(model, t, grid);
}

void to_json(nlohmann::json& j, const ContourSpec& c) {
    j = nlohmann::json{{"lambda0", c.lambda0},
                       {"panels", c.panels},
                       {"reference_height", c.reference_height},
                       {"first_panel", c.first_panel},
                       {"min_height", c.min_height},
                       {"max_height", c.max_height},
                       {"tail_tolerance", c.tail_tolerance},
                       {"K", c.K}};
}

void to_json(nlohmann::json& j, const InversionReport& r) {
    j = nlohmann::json{{"lambda0", r.lambda0},     {"height", r.height},
                       {"panels", r.panels},       {"nodes", r.nodes},
                       {"tail_estimate", r.tail_estimate}, {"K", r.K},
                       {"max_residual", r.max_residual}};
}

namespace {

// int_0^1 s^k exp(i theta s) ds, k = 0..3
std::array<cplx, 4> filon_moments(double theta) {
    std::array<cplx, 4> mu{};
    const cplx it(0.0, theta);
    if (std::fabs(theta) < 2.0) {
        for (int k = 0; k < 4; ++k) {
            cplx term(1.0, 0.0);
            cplx sum(0.0, 0.0);
            for (int m = 0; m < 60; ++m) {
                sum += term / static_cast<double>(k + m + 1);
                term *= it / static_cast<double>(m + 1);
            }
            mu[k] = sum;
        }
        return mu;
    }
    const cplx e = std::exp(it);
    mu[0] = (e - 1.0) / it;
    for (int k = 1; k < 4; ++k) {
        mu[k] = (e - static_cast<double>(k) * mu[k - 1]) / it;
    }
    return mu;
}

// Lagrange basis on 0, 1/3, 2/3, 1 as coefficients of s^0..s^3
constexpr double kLagrange[4][4] = {
    {1.0, -5.5, 9.0, -4.5},
    {0.0, 9.0, -22.5, 13.5},
    {0.0, -4.5, 18.0, -13.5},
    {0.0, 1.0, -4.5, 4.5},
};

double geometric_ratio(double w0, std::size_t panels, double height) {
    const double n = static_cast<double>(panels);
    if (w0 * n >= height) {
        return 1.0;
    }
    const auto reach = [&](double r) { return w0 * std::expm1(n * std::log(r)) / (r - 1.0); };
    double lo = 1.0 + 1e-12;
    double hi = 2.0;
    while (reach(hi) < height) {
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (reach(mid) < height ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// exp(-r x_i) for all i, by recurrence when the grid is uniform
std::vector<cplx> exp_table(const std::vector<cplx>& rates, const std::vector<double>& grid) {
    const std::size_t n = grid.size();
    const std::size_t K = rates.size();
    std::vector<cplx> out(K * n);
    bool uniform = n > 2;
    const double dx = n > 1 ? grid[1] - grid[0] : 0.0;
    for (std::size_t i = 2; uniform && i < n; ++i) {
        uniform = std::fabs(grid[i] - grid[i - 1] - dx) <= 1e-12 * (std::fabs(grid[i]) + dx);
    }
    for (std::size_t k = 0; k < K; ++k) {
        cplx* row = out.data() + k * n;
        if (!uniform) {
            for (std::size_t i = 0; i < n; ++i) {
                row[i] = std::exp(-rates[k] * grid[i]);
            }
            continue;
        }
        const cplx step = std::exp(-rates[k] * dx);
        for (std::size_t i = 0; i < n; ++i) {
            row[i] = (i % 32 == 0) ? std::exp(-rates[k] * grid[i]) : row[i - 1] * step;
        }
    }
    return out;
}

// atom + sum_k w_k c_k exp(-r_k x_i), c_k = r_k for densities, 1 for survival
std::vector<cplx> factor_on_grid(const ComplexFactor& f, const std::vector<double>& grid, bool density) {
    const std::vector<cplx> e = exp_table(f.rates, grid);
    const std::size_t n = grid.size();
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < f.rates.size(); ++k) {
        const cplx c = density ? f.weights[k] * f.rates[k] : f.weights[k];
        const cplx* row = e.data() + k * n;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += c * row[i];
        }
    }
    return out;
}

// mass of [x, infinity): 1 at x = 0, 0 at x = infinity
std::vector<cplx> tail_on_edges(const ComplexFactor& f, const std::vector<double>& edges) {
    std::vector<double> inner;
    for (double x : edges) {
        if (x > 0.0 && std::isfinite(x)) {
            inner.push_back(x);
        }
    }
    const std::vector<cplx> s = factor_on_grid(f, inner, false);
    std::vector<cplx> out(edges.size());
    std::size_t m = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i] == 0.0) {
            out[i] = 1.0;
        } else if (std::isinf(edges[i])) {
            out[i] = 0.0;
        } else {
            out[i] = s[m++];
        }
    }
    return out;
}

void check_edges(const std::vector<double>& edges, const char* what) {
    if (edges.size() < 2) {
        throw std::invalid_argument(std::string("joint bin masses: need two or more ") + what + " edges");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!(edges[i] >= 0.0) || (i > 0 && !(edges[i] > edges[i - 1]))) {
            throw std::invalid_argument(std::string("joint bin masses: ") + what +
                                        " edges must be nonnegative and increasing");
        }
    }
}

// (1 - exp(-z L)) / z, L = infinity allowed
cplx phi_interval(cplx z, double L) {
    if (std::isinf(L)) {
        return 1.0 / z;
    }
    const cplx zl = z * L;
    if (std::abs(zl) < 1e-3) {
        return L * (1.0 - zl / 2.0 + zl * zl / 6.0 - zl * zl * zl / 24.0);
    }
    return (1.0 - std::exp(-zl)) / z;
}

}  // namespace

std::array<cplx, 4> filon_cubic_weights(double a, double h, double t) {
    const std::array<cplx, 4> mu = filon_moments(h * t);
    const cplx phase = h * std::exp(cplx(0.0, a * t));
    std::array<cplx, 4> w{};
    for (int j = 0; j < 4; ++j) {
        cplx sum(0.0, 0.0);
        for (int k = 0; k < 4; ++k) {
            sum += kLagrange[j][k] * mu[k];
        }
        w[j] = phase * sum;
    }
    return w;
}

std::vector<double> bromwich_invert(const LevyModel& model, double t, std::size_t n_out,
                                    const LaplaceTransform& transform, const ContourSpec& spec,
                                    InversionReport* report, const std::optional<GammaTime>& gamma) {
    if (gamma) {
        if (gamma->n == 0 || !(gamma->rate > 0.0)) {
            throw std::invalid_argument("bromwich inversion: gamma time needs n >= 1 and rate > 0");
        }
        t = static_cast<double>(gamma->n) / gamma->rate;
    }
    if (!(t > 0.0)) {
        throw std::invalid_argument("bromwich inversion: t must be > 0");
    }
    if (spec.panels == 0) {
        throw std::invalid_argument("bromwich inversion: panels must be >= 1");
    }
    double lambda0 = spec.lambda0 > 0.0 ? spec.lambda0 : 2.0 / t;
    if (gamma && spec.lambda0 <= 0.0) {
        lambda0 = std::min(lambda0, 0.5 * gamma->rate);
    }
    if (gamma && !(lambda0 < gamma->rate)) {
        throw std::invalid_argument("bromwich inversion: lambda0 must be below the gamma rate");
    }
    const double p = static_cast<double>(spec.panels);
    const double w0 = spec.first_panel > 0.0 ? spec.first_panel : (gamma ? 0.05 : 0.25) / t * 512.0 / p;
    const double href = spec.reference_height > 0.0 ? spec.reference_height : 1e5 / t;
    const double hmin = spec.min_height > 0.0 ? spec.min_height : 50.0 / t;
    const double hmax = spec.max_height > 0.0 ? spec.max_height : 1e7 / t;
    const double ratio = geometric_ratio(w0, spec.panels, href);
    // exp(lambda t) = exp(lambda0 t) exp(i u t) is carried by the Filon weights;
    // the gamma kernel decays algebraically and is interpolated directly
    const double freq = gamma ? 0.0 : t;
    const double prefactor = (gamma ? 1.0 : std::exp(lambda0 * t)) / std::numbers::pi;

    RootTracker tracker(model, lambda0, spec.K, spec.continuation, 1);
    std::vector<cplx> raw(n_out), prev(n_out), acc(n_out, cplx(0.0, 0.0));
    double max_residual = 0.0;
    std::size_t nodes = 0;

    const auto evaluate = [&](double u, std::vector<cplx>& g) {
        tracker.advance_to(u);
        const ComplexFactorization f = tracker.factorization(false);
        max_residual = std::max(max_residual, f.max_residual);
        transform(f, raw.data());
        const cplx mu = f.lambda;
        cplx kernel(1.0, 0.0);
        if (gamma) {
            kernel = std::exp(-static_cast<double>(gamma->n) * std::log(1.0 - mu / gamma->rate));
        }
        for (std::size_t i = 0; i < n_out; ++i) {
            g[i] = kernel * raw[i];
            if (!std::isfinite(g[i].real()) || !std::isfinite(g[i].imag())) {
                throw ContourError("bromwich inversion: non-finite transform at u = " + std::to_string(u));
            }
        }
        ++nodes;
    };

    std::vector<cplx> cur(n_out);
    evaluate(0.0, prev);
    double a = 0.0;
    double width = w0;
    std::size_t panels = 0;
    double tail = std::numeric_limits<double>::infinity();
    for (;;) {
        const std::array<cplx, 4> w = filon_cubic_weights(a, width, freq);
        for (std::size_t i = 0; i < n_out; ++i) {
            acc[i] += w[0] * prev[i];
        }
        for (int j = 1; j <= 3; ++j) {
            evaluate(a + width * j / 3.0, cur);
            for (std::size_t i = 0; i < n_out; ++i) {
                acc[i] += w[j] * cur[i];
            }
        }
        prev.swap(cur);
        a += width;
        width *= ratio;
        ++panels;
        double gmax = 0.0;
        for (const cplx& v : prev) {
            gmax = std::max(gmax, std::abs(v));
        }
        tail = gamma ? prefactor * gmax * a / static_cast<double>(gamma->n) : prefactor * gmax / t;
        if (a >= hmin && tail < spec.tail_tolerance) {
            break;
        }
        if (a >= hmax) {
            throw ContourError("bromwich inversion: tail estimate " + std::to_string(tail) +
                               " above tolerance at the maximum contour height " + std::to_string(hmax));
        }
    }
    if (report) {
        report->lambda0 = lambda0;
        report->height = a;
        report->panels = panels;
        report->nodes = nodes;
        report->tail_estimate = tail;
        report->K = spec.K;
        report->max_residual = max_residual;
    }
    std::vector<double> out(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        out[i] = prefactor * acc[i].real();
    }
    return out;
}

JointDensityGrid joint_density(const LevyModel& model, double t, const std::vector<double>& x_grid,
                               const std::vector<double>& y_grid, const ContourSpec& spec) {
    for (const auto* g : {&x_grid, &y_grid}) {
        for (double v : *g) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("joint density: grid points must be finite and > 0");
            }
        }
    }
    const std::size_t nx = x_grid.size(), ny = y_grid.size();
    const auto transform = [&](const ComplexFactorization& f, cplx* out) {
        const std::vector<cplx> a = factor_on_grid(f.sup, x_grid, true);
        const std::vector<cplx> b = factor_on_grid(f.inf, y_grid, true);
        const cplx inv = 1.0 / f.lambda;
        for (std::size_t i = 0; i < nx; ++i) {
            const cplx ai = a[i] * inv;
            for (std::size_t j = 0; j < ny; ++j) {
                out[i * ny + j] = ai * b[j];
            }
        }
    };
    JointDensityGrid grid;
    grid.x = x_grid;
    grid.y = y_grid;
    grid.values = bromwich_invert(model, t, nx * ny, transform, spec, &grid.report);
    grid.min_value = grid.values.empty() ? 0.0 : *std::min_element(grid.values.begin(), grid.values.end());
    return grid;
}

JointDensityGrid joint_bin_masses(const LevyModel& model, double t, const std::vector<double>& x_edges,
                                  const std::vector<double>& y_edges, const ContourSpec& spec,
                                  const std::optional<GammaTime>& gamma) {
    check_edges(x_edges, "x");
    check_edges(y_edges, "y");
    const std::size_t nx = x_edges.size(), ny = y_edges.size();
    // G(x, y) = P(sup >= x, sup - X >= y); G(0, 0) = 1 and infinite edges give 0
    std::vector<std::size_t> index(nx * ny, SIZE_MAX);
    std::size_t n_out = 0;
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const bool trivial = (x_edges[i] == 0.0 && y_edges[j] == 0.0) || std::isinf(x_edges[i]) ||
                                 std::isinf(y_edges[j]);
            if (!trivial) {
                index[i * ny + j] = n_out++;
            }
        }
    }
    const auto transform = [&](const ComplexFactorization& f, cplx* out) {
        const std::vector<cplx> a = tail_on_edges(f.sup, x_edges);
        const std::vector<cplx> b = tail_on_edges(f.inf, y_edges);
        const cplx inv = 1.0 / f.lambda;
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < ny; ++j) {
                const std::size_t m = index[i * ny + j];
                if (m != SIZE_MAX) {
                    out[m] = a[i] * b[j] * inv;
                }
            }
        }
    };
    JointDensityGrid grid;
    std::vector<double> g_values(nx * ny, 0.0);
    if (n_out > 0) {
        const std::vector<double> inverted = bromwich_invert(model, t, n_out, transform, spec, &grid.report, gamma);
        for (std::size_t m = 0; m < nx * ny; ++m) {
            if (index[m] != SIZE_MAX) {
                g_values[m] = inverted[index[m]];
            }
        }
    }
    if (x_edges[0] == 0.0 && y_edges[0] == 0.0) {
        g_values[0] = 1.0;
    }
    grid.x = x_edges;
    grid.y = y_edges;
    grid.values.resize((nx - 1) * (ny - 1));
    for (std::size_t i = 0; i + 1 < nx; ++i) {
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            grid.values[i * (ny - 1) + j] = g_values[i * ny + j] - g_values[(i + 1) * ny + j] -
                                            g_values[i * ny + j + 1] + g_values[(i + 1) * ny + j + 1];
        }
    }
    grid.min_value = *std::min_element(grid.values.begin(), grid.values.end());
    return grid;
}

void write_joint_csv(std::ostream& os, const JointDensityGrid& grid) {
    const bool bins = grid.values.size() != grid.x.size() * grid.y.size();
    const std::size_t ny = bins ? grid.y.size() - 1 : grid.y.size();
    const std::size_t nx = bins ? grid.x.size() - 1 : grid.x.size();
    os << (bins ? "x_lo,x_hi,y_lo,y_hi,mass\n" : "x,y,density\n");
    os.precision(12);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            if (bins) {
                os << grid.x[i] << ',' << grid.x[i + 1] << ',' << grid.y[j] << ',' << grid.y[j + 1] << ',';
            } else {
                os << grid.x[i] << ',' << grid.y[j] << ',';
            }
            os << grid.values[i * ny + j] << '\n';
        }
    }
}

double sup_atom_probability(const LevyModel& model, double t, const ContourSpec& spec,
                            const std::optional<GammaTime>& gamma, InversionReport* report) {
    // invert whichever of a+ / lambda and (1 - a+) / lambda decays along the contour
    double lambda0 = spec.lambda0 > 0.0 ? spec.lambda0 : 2.0 / (gamma ? gamma->n / gamma->rate : t);
    if (gamma && spec.lambda0 <= 0.0) {
        lambda0 = std::min(lambda0, 0.5 * gamma->rate);
    }
    const RootTracker anchor(model, lambda0, spec.K, spec.continuation);
    const bool has_atom = std::abs(anchor.factorization().sup.atom) > 1e-6;
    const auto transform = [&](const ComplexFactorization& f, cplx* out) {
        out[0] = (has_atom ? 1.0 - f.sup.atom : f.sup.atom) / f.lambda;
    };
    ContourSpec s = spec;
    s.lambda0 = lambda0;
    const double v = bromwich_invert(model, t, 1, transform, s, report, gamma)[0];
    return has_atom ? 1.0 - v : v;
}

std::vector<double> benchmark_up_and_out(const LevyModel& model, const UpAndOutPayoff& payoff,
                                         const std::vector<double>& spots, double t, const ContourSpec& spec,
                                         InversionReport* report) {
    const double K = payoff.strike;
    const double b = payoff.barrier;
    if (!(K > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("benchmark price: strike and barrier must be > 0");
    }
    struct Spot {
        double s, kappa, beta, x_lo, L, f00;
        bool live;
    };
    std::vector<Spot> sp;
    std::vector<std::size_t> live;
    for (double s : spots) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("benchmark price: spot must be > 0");
        }
        Spot q{};
        q.s = s;
        q.kappa = std::log(K / s);
        q.beta = std::isinf(b) ? b : std::log(b / s);
        q.x_lo = std::max(0.0, q.kappa);
        q.L = q.beta - q.x_lo;
        q.f00 = (s < b) ? std::max(s - K, 0.0) : 0.0;
        q.live = q.beta > 0.0 && q.L > 0.0;
        if (q.live) {
            live.push_back(sp.size());
        }
        sp.push_back(q);
    }
    const auto transform = [&](const ComplexFactorization& f, cplx* out) {
        const auto& rho = f.sup.rates;
        const auto& w = f.sup.weights;
        const auto& sig = f.inf.rates;
        const auto& v = f.inf.weights;
        const std::size_t n = rho.size(), m = sig.size();
        cplx A = f.inf.atom;
        for (std::size_t l = 0; l < m; ++l) {
            A += v[l] * sig[l] / (1.0 + sig[l]);
        }
        std::vector<cplx> D(n * m);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < m; ++l) {
                D[k * m + l] = 1.0 / (rho[k] + sig[l]);
            }
        }
        std::vector<cplx> gam(m), gam_end(m), dg(n), dg_end(n);
        for (std::size_t o = 0; o < live.size(); ++o) {
            const Spot& q = sp[live[o]];
            const bool bounded = std::isfinite(q.L);
            for (std::size_t l = 0; l < m; ++l) {
                gam[l] = K * v[l] / (1.0 + sig[l]) * std::exp(-sig[l] * (q.x_lo - q.kappa));
                gam_end[l] = bounded ? gam[l] * std::exp(-sig[l] * q.L) : cplx(0.0, 0.0);
            }
            cplx e = 0.0;
            if (q.x_lo == 0.0) {
                cplx i0 = A * q.s - K;
                for (std::size_t l = 0; l < m; ++l) {
                    i0 += K * v[l] / (1.0 + sig[l]) * std::exp(sig[l] * q.kappa);
                }
                e += f.sup.atom * i0;
            }
            for (std::size_t k = 0; k < n; ++k) {
                const cplx ak = w[k] * rho[k] * std::exp(-rho[k] * q.x_lo);
                cplx term = A * q.s * std::exp(q.x_lo) * phi_interval(rho[k] - 1.0, q.L) - K * phi_interval(rho[k], q.L);
                cplx bil(0.0, 0.0);
                const cplx decay = bounded ? std::exp(-rho[k] * q.L) : cplx(0.0, 0.0);
                for (std::size_t l = 0; l < m; ++l) {
                    bil += D[k * m + l] * (gam[l] - decay * gam_end[l]);
                }
                e += ak * (term + bil);
            }
            out[o] = (e - q.f00) / f.lambda;
        }
    };
    std::vector<double> prices(sp.size(), 0.0);
    if (!live.empty()) {
        const std::vector<double> inv = bromwich_invert(model, t, live.size(), transform, spec, report);
        for (std::size_t o = 0; o < live.size(); ++o) {
            prices[live[o]] = inv[o];
        }
    }
    const double disc = std::exp(-payoff.r * t);
    for (std::size_t i = 0; i < sp.size(); ++i) {
        prices[i] = disc * (sp[i].f00 + prices[i]);
    }
    return prices;
}

double lewis_call_price(const std::function<cplx(cplx)>& psi, double s, double strike, double r, double t) {
    const double k = std::log(s / strike);
    const auto integrand = [&](double u) {
        const cplx phi = std::exp(-t * psi(cplx(u, -0.5)));
        return (std::exp(cplx(0.0, u * k)) * phi).real() / (u * u + 0.25);
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    const double integral = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
    const double forward = s * std::exp(-t * psi(cplx(0.0, -1.0))).real();
    return std::exp(-r * t) * (forward - std::sqrt(s * strike) / std::numbers::pi * integral);
}

double lewis_call_price(const LevyModel& model, double s, double strike, double r, double t) {
    return lewis_call_price([&](cplx z) { return model.psi(z); }, s, strike, r, t);
}

}  // namespace whmc
