#include "whmc/wh_factorization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "whmc/simd_kernels.hpp"

namespace whmc {

using ld = long double;

namespace {

long double side_sign(Side side) { return side == Side::sup ? -1.0L : 1.0L; }

const char* side_name(Side side) { return side == Side::sup ? "sup" : "inf"; }

struct AxisFunction {
    const LevyModel& model;
    ld lambda;
    ld sign;

    ld value(ld m) const { return lambda + model.psi_axis(sign * m); }
    ld slope(ld m) const { return sign * model.dpsi_axis(sign * m); }
};

ld solve_in_bracket(const AxisFunction& f, ld a, ld b, ld fa, ld fb, ld width, std::optional<ld> guess,
                    const RootSolverOptions& opt) {
    const ld tol = opt.bisection_rel_width * width;
    const bool rising = fb > 0.0L;
    ld lo = a;
    ld hi = b;
    ld x;
    if (guess) {
        // safeguarded Newton from the tabulated initializer
        x = std::clamp(*guess, lo + 0.5L * tol, hi - 0.5L * tol);
        for (int it = 0; it < 200 && hi - lo > tol; ++it) {
            const ld fx = f.value(x);
            if (fx == 0.0L) {
                return x;
            }
            if ((fx > 0.0L) == rising) {
                hi = x;
            } else {
                lo = x;
            }
            const ld d = f.slope(x);
            ld next = d != 0.0L ? x - fx / d : 0.5L * (lo + hi);
            if (!(next > lo && next < hi)) {
                next = 0.5L * (lo + hi);
            }
            if (std::fabs(next - x) < 0.25L * tol) {
                x = next;
                break;
            }
            x = next;
        }
    } else {
        (void)fa;
        while (hi - lo > tol) {
            const ld mid = 0.5L * (lo + hi);
            const ld fm = f.value(mid);
            if (fm == 0.0L) {
                lo = hi = mid;
                break;
            }
            if ((fm > 0.0L) == rising) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        x = 0.5L * (lo + hi);
    }
    for (int it = 0; it < opt.newton_steps; ++it) {
        const ld fx = f.value(x);
        const ld d = f.slope(x);
        if (fx == 0.0L || d == 0.0L) {
            break;
        }
        const ld next = x - fx / d;
        if (!(next > a && next < b)) {
            break;
        }
        if (std::fabs(f.value(next)) > std::fabs(fx)) {
            break;
        }
        x = next;
    }
    return x;
}

}  // namespace

std::vector<long double> locate_side_roots(const LevyModel& model, double lambda, std::size_t K, Side side,
                                           std::vector<Bracket>* brackets, const RootSolverOptions& opt) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("locate_roots: lambda must be positive and finite");
    }
    if (K < 1) {
        throw std::invalid_argument("locate_roots: truncation K must be >= 1");
    }
    const PoleLadder poles = model.poles(side);
    const AxisFunction f{model, static_cast<ld>(lambda), side_sign(side)};
    std::vector<long double> roots;
    roots.reserve(K + 1);
    if (brackets) {
        brackets->clear();
        brackets->reserve(K + 1);
    }
    for (std::size_t n = 0; n <= K; ++n) {
        const ld lo = poles.pole(n);
        const ld hi = poles.pole(n + 1);
        const ld width = hi - lo;
        const ld a = n == 0 ? lo : lo + opt.endpoint_inset * width;
        const ld b = hi - opt.endpoint_inset * width;
        const ld fa = f.value(a);
        const ld fb = f.value(b);
        if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0L) == (fb > 0.0L)) {
            std::ostringstream os;
            os << "no sign change of lambda + Psi(iz) in bracket " << n << " on the " << side_name(side)
               << " side: (" << static_cast<double>(lo) << ", " << static_cast<double>(hi) << ")";
            throw RootLocationError(os.str(), side, n);
        }
        std::optional<ld> guess;
        if (n >= opt.asymptotic_from) {
            guess = model.asymptotic_root(side, n);
        }
        roots.push_back(solve_in_bracket(f, a, b, fa, fb, width, guess, opt));
        if (brackets) {
            brackets->push_back({lo, hi});
        }
    }
    return roots;
}

RootLadder locate_roots(const LevyModel& model, double lambda, std::size_t K, const RootSolverOptions& opt) {
    RootLadder ladder;
    ladder.lambda = lambda;
    ladder.count = K;
    const auto plus = locate_side_roots(model, lambda, K, Side::inf, &ladder.plus_brackets, opt);
    const auto minus = locate_side_roots(model, lambda, K, Side::sup, &ladder.minus_brackets, opt);
    ladder.plus_roots = plus;
    for (ld m : minus) {
        ladder.minus_roots.push_back(-m);
    }
    for (auto& b : ladder.minus_brackets) {
        b = {-b.hi, -b.lo};
    }
    for (ld z : ladder.plus_roots) {
        ladder.plus_residuals.push_back(std::fabs(static_cast<ld>(lambda) + model.psi_axis(z)));
    }
    for (ld z : ladder.minus_roots) {
        ladder.minus_residuals.push_back(std::fabs(static_cast<ld>(lambda) + model.psi_axis(z)));
    }
    return ladder;
}

RootLadder locate_roots_beta(const BetaFamilyParams& params, double lambda, std::size_t K) {
    return locate_roots(LevyModel::beta_family(params), lambda, K);
}

RootLadder locate_roots_hypergeometric(const HypergeometricParams& params, double lambda, std::size_t K) {
    return locate_roots(LevyModel::hypergeometric(params), lambda, K);
}

// ---------------------------------------------------------------------------
// FactorLaw

FactorLaw::FactorLaw(double atom0, std::vector<double> rates, std::vector<double> weights, std::size_t truncation,
                     double tail_bound)
    : atom0_(atom0), rates_(std::move(rates)), weights_(std::move(weights)), truncation_(truncation),
      tail_bound_(tail_bound) {
    if (rates_.size() != weights_.size()) {
        throw std::invalid_argument("FactorLaw: rates and weights differ in length");
    }
    if (!(atom0_ >= 0.0 && atom0_ <= 1.0)) {
        throw std::invalid_argument("FactorLaw: atom0 must lie in [0, 1]");
    }
    for (std::size_t k = 0; k < rates_.size(); ++k) {
        if (!(rates_[k] > 0.0) || !std::isfinite(rates_[k]) || !std::isfinite(weights_[k])) {
            throw std::invalid_argument("FactorLaw: rates must be positive and weights finite");
        }
    }
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (atom0_ < 1.0) {
        if (!(total > 0.0)) {
            throw LawValidityError("FactorLaw: nonpositive continuous mass");
        }
        const double scale = (1.0 - atom0_) / total;
        if (std::fabs(scale - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
            for (double& w : weights_) {
                w *= scale;
            }
        }
    } else {
        rates_.clear();
        weights_.clear();
    }
    dens_coef_.resize(rates_.size());
    for (std::size_t k = 0; k < rates_.size(); ++k) {
        dens_coef_[k] = weights_[k] * rates_[k];
    }
}

FactorLaw FactorLaw::exponential(double rate, double atom0) {
    return FactorLaw(atom0, {rate}, {1.0 - atom0}, 1, 0.0);
}

FactorLaw FactorLaw::point_mass_at_zero() { return FactorLaw(1.0, {}, {}, 0, 0.0); }

double FactorLaw::survival(double x) const {
    if (x < 0.0) {
        return 1.0;
    }
    return simd::exp_sum(rates_.data(), weights_.data(), rates_.size(), x);
}

double FactorLaw::density(double x) const {
    if (x < 0.0) {
        return 0.0;
    }
    return simd::exp_sum(rates_.data(), dens_coef_.data(), rates_.size(), x);
}

double FactorLaw::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < rates_.size(); ++k) {
        m += weights_[k] / rates_[k];
    }
    return m;
}

cplx FactorLaw::cf(double theta) const {
    cplx acc(atom0_, 0.0);
    for (std::size_t k = 0; k < rates_.size(); ++k) {
        acc += dens_coef_[k] / cplx(rates_[k], -theta);
    }
    return acc;
}

double FactorLaw::laplace(double s) const {
    double acc = atom0_;
    for (std::size_t k = 0; k < rates_.size(); ++k) {
        acc += dens_coef_[k] / (rates_[k] + s);
    }
    return acc;
}

double FactorLaw::min_rate() const {
    if (rates_.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    return *std::min_element(rates_.begin(), rates_.end());
}

double FactorLaw::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) {
        throw std::domain_error("quantile: u must lie in (0, 1)");
    }
    return quantile_upper(1.0 - u);
}

namespace {

// Solves S(x) = v on a monotone survival function by Newton on log S with
// bisection safeguards.
double solve_survival(const FactorLaw& law, const std::vector<double>& rates, const std::vector<double>& weights,
                      const std::vector<double>& dens, double v, double guess) {
    const double s0 = 1.0 - law.atom0();
    double lo = 0.0;
    double hi = 60.0 / law.min_rate();
    double s_hi = 0.0;
    double f_hi = 0.0;
    simd::exp_sum2(rates.data(), weights.data(), dens.data(), rates.size(), hi, s_hi, f_hi);
    for (int doubling = 0; s_hi > v; ++doubling) {
        if (doubling > 60) {
            throw LawValidityError("quantile: survival does not fall below the target level");
        }
        lo = hi;
        hi *= 2.0;
        simd::exp_sum2(rates.data(), weights.data(), dens.data(), rates.size(), hi, s_hi, f_hi);
    }
    const double tol = std::min(1e-12 * s0, 1e-13 * v);
    double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    const double log_v = std::log(v);
    for (int it = 0; it < 300; ++it) {
        double s = 0.0;
        double f = 0.0;
        simd::exp_sum2(rates.data(), weights.data(), dens.data(), rates.size(), x, s, f);
        if (f < -1e-12 * std::max(1.0, std::fabs(s)) || s > s0 * (1.0 + 1e-12) || s < -1e-300) {
            std::ostringstream os;
            os << "quantile: survival function is not monotone near x = " << x
               << " (truncation too coarse?)";
            throw LawValidityError(os.str());
        }
        if (std::fabs(s - v) <= tol) {
            return x;
        }
        if (s > v) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            return 0.5 * (lo + hi);
        }
        double next = 0.5 * (lo + hi);
        if (s > 0.0 && f > 0.0) {
            const double step = (std::log(s) - log_v) * s / f;
            const double cand = x + step;
            if (cand > lo && cand < hi) {
                next = cand;
            }
        }
        x = next;
    }
    return x;
}

}  // namespace

double FactorLaw::quantile_upper(double v) const {
    if (!(v > 0.0 && v < 1.0)) {
        throw std::domain_error("quantile: tail probability must lie in (0, 1)");
    }
    if (v >= 1.0 - atom0_) {
        return 0.0;
    }
    return solve_survival(*this, rates_, weights_, dens_coef_, v, -1.0);
}

void FactorLaw::build_sampler(std::size_t nodes, double tau_max) {
    table_x_.clear();
    table_dx_.clear();
    if (atom0_ >= 1.0 || nodes < 2) {
        return;
    }
    const double s0 = 1.0 - atom0_;
    tau_max_ = tau_max;
    table_step_ = 1.0 / static_cast<double>(nodes - 1);
    table_x_.resize(nodes);
    table_dx_.resize(nodes);
    table_x_[0] = 0.0;
    double f0 = density(0.0);
    if (!(f0 > 0.0)) {
        throw LawValidityError("sampler: density at zero is not positive");
    }
    table_dx_[0] = 0.0;
    double prev = 0.0;
    for (std::size_t j = 1; j < nodes; ++j) {
        const double s = static_cast<double>(j) * table_step_;
        const double tau = tau_max * s * s;
        const double v = s0 * std::exp(-tau);
        const double x = solve_survival(*this, rates_, weights_, dens_coef_, v, prev);
        double sv = 0.0;
        double fv = 0.0;
        simd::exp_sum2(rates_.data(), weights_.data(), dens_coef_.data(), rates_.size(), x, sv, fv);
        if (!(fv > 0.0)) {
            throw LawValidityError("sampler: nonpositive density inside the table range");
        }
        table_x_[j] = x;
        table_dx_[j] = sv / fv * 2.0 * tau_max * s;
        prev = x;
    }
}

double FactorLaw::sample_upper(double v) const {
    if (v >= 1.0 - atom0_) {
        return 0.0;
    }
    if (table_x_.empty()) {
        return quantile_upper(v);
    }
    const double tau = -std::log(v / (1.0 - atom0_));
    if (!(tau < tau_max_)) {
        return quantile_upper(v);
    }
    const double s = std::sqrt(tau / tau_max_);
    const double pos = s / table_step_;
    const std::size_t j = std::min(static_cast<std::size_t>(pos), table_x_.size() - 2);
    const double t = pos - static_cast<double>(j);
    const double h = table_step_;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * table_x_[j] + h10 * h * table_dx_[j] + h01 * table_x_[j + 1] + h11 * h * table_dx_[j + 1];
}

double factor_survival(const FactorLaw& law, double x) {
    if (x < 0.0) {
        throw std::domain_error("survival: x must be >= 0");
    }
    return law.survival(x);
}

cplx factor_cf(const FactorLaw& law, double theta) { return law.cf(theta); }

double quantile(const FactorLaw& law, double u) { return law.quantile(u); }

double sample_factor(const FactorLaw& law, RandomStream& rng) { return law.sample_upper(rng.uniform()); }

// ---------------------------------------------------------------------------
// Coefficients

std::vector<long double> product_weights(const std::vector<long double>& roots, const PoleLadder& poles,
                                         std::size_t n_poles) {
    const std::size_t n = roots.size();
    std::vector<long double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const ld rk = roots[k];
        ld log_mag = 0.0L;
        int sign = 1;
        for (std::size_t j = 1; j <= n_poles; ++j) {
            const ld term = 1.0L - rk / poles.pole(j);
            if (term == 0.0L) {
                return std::vector<long double>(n, 0.0L);
            }
            log_mag += std::log(std::fabs(term));
            sign *= term < 0.0L ? -1 : 1;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) {
                continue;
            }
            const ld term = 1.0L - rk / roots[j];
            if (std::fabs(term) < 1e-15L) {
                std::ostringstream os;
                os << "factor coefficients: coincident roots at indices " << k << " and " << j;
                throw DegeneracyError(os.str());
            }
            log_mag -= std::log(std::fabs(term));
            sign *= term < 0.0L ? -1 : 1;
        }
        out[k] = sign * std::exp(log_mag);
    }
    return out;
}

namespace {

double estimate_tail(const std::vector<long double>& w) {
    const std::size_t K = w.size() - 1;
    const std::size_t first = std::max<std::size_t>(1, K / 2);
    if (K < 2 || first >= K) {
        return 1.0;
    }
    ld sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t k = first; k <= K; ++k) {
        if (w[k] == 0.0L) {
            continue;
        }
        const ld x = std::log(static_cast<ld>(k));
        const ld y = std::log(std::fabs(w[k]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) {
        return 1.0;
    }
    const ld slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const ld intercept = (sy - slope * sx) / cnt;
    if (!(slope < -1.0L)) {
        return 1.0;
    }
    // integral of exp(intercept) k^slope from K + 1/2 to infinity
    const ld start = static_cast<ld>(K) + 0.5L;
    const ld tail = std::exp(intercept) * std::pow(start, slope + 1.0L) / (-(slope + 1.0L));
    return static_cast<double>(std::min<ld>(tail, 1.0L));
}

}  // namespace

FactorLaw factor_coefficients(const RootLadder& ladder, const LevyModel& model, Side side,
                              CoefficientDiagnostics* diag) {
    const auto& signed_roots = ladder.roots(side);
    if (signed_roots.size() < 2) {
        throw std::invalid_argument("factor_coefficients: need K >= 1 roots on the requested side");
    }
    std::vector<long double> rho;
    rho.reserve(signed_roots.size());
    for (ld z : signed_roots) {
        rho.push_back(std::fabs(z));
    }
    const std::size_t K = rho.size() - 1;
    const PoleLadder poles = model.poles(side);

    // A root sitting in the upper half of its bracket is paired with the pole
    // above it; the truncated transform then keeps a nonzero limit at infinity.
    const ld lo = poles.pole(K);
    const ld hi = poles.pole(K + 1);
    const ld frac = (rho[K] - lo) / (hi - lo);
    const std::size_t n_poles = frac > 0.5L ? K + 1 : K;

    const auto w = product_weights(rho, poles, n_poles);
    ld sum = 0.0L;
    for (ld c : w) {
        sum += c;
    }
    ld prod_atom = 1.0L;
    for (std::size_t n = 0; n <= K; ++n) {
        prod_atom *= rho[n] / poles.pole(n + 1);
    }
    const double raw_atom = static_cast<double>(1.0L - sum);
    const double atom0 = std::clamp(raw_atom, 0.0, 1.0);
    if (diag) {
        diag->numerator_poles = n_poles;
        diag->raw_atom = raw_atom;
        diag->product_atom = static_cast<double>(prod_atom);
        diag->weight_sum = static_cast<double>(sum);
    }
    std::vector<double> rates(rho.size());
    std::vector<double> weights(rho.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        rates[k] = static_cast<double>(rho[k]);
        weights[k] = static_cast<double>(w[k]);
    }
    return FactorLaw(atom0, std::move(rates), std::move(weights), K, estimate_tail(w));
}

// ---------------------------------------------------------------------------
// Validation

std::vector<double> default_validation_grid(const FactorLaw& law, std::size_t points) {
    std::vector<double> grid;
    if (law.rates().empty()) {
        grid.push_back(0.0);
        return grid;
    }
    const double span = 40.0 / law.min_rate();
    for (std::size_t i = 0; i < points; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(points - 1);
        grid.push_back(span * s * s);
    }
    return grid;
}

ValidationReport validate_law(const FactorLaw& law, const std::vector<double>& grid) {
    ValidationReport rep;
    rep.warn = law.tail_warning();
    const auto fail = [&](const std::string& what, double x, double value) {
        if (rep.pass) {
            rep.pass = false;
            rep.failure = what;
            rep.worst_x = x;
            rep.worst_value = value;
        }
    };
    const double s0 = law.survival(0.0);
    rep.mass_error = std::fabs(law.atom0() + s0 - 1.0);
    if (law.atom0() < 0.0 || law.atom0() > 1.0) {
        fail("atom outside [0, 1]", 0.0, law.atom0());
    }
    if (rep.mass_error > 1e-12) {
        fail("mass balance atom0 + S(0) != 1", 0.0, rep.mass_error);
    }
    std::vector<double> xs = grid;
    std::sort(xs.begin(), xs.end());
    double fmax = 0.0;
    std::vector<double> dens(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        dens[i] = law.density(xs[i]);
        fmax = std::max(fmax, std::fabs(dens[i]));
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (dens[i] < dens[worst]) {
            worst = i;
        }
    }
    if (!xs.empty() && dens[worst] < -1e-10 * fmax) {
        fail("negative density", xs[worst], dens[worst]);
    }
    double prev = s0;
    for (double x : xs) {
        const double s = law.survival(x);
        if (s > prev + 1e-13 || s < -1e-13) {
            fail(s < 0.0 ? "negative survival" : "survival increases", x, s);
            break;
        }
        prev = s;
    }
    for (int i = -60; i <= 60; ++i) {
        const double theta = std::copysign(std::pow(10.0, std::fabs(i) / 20.0 - 1.0), static_cast<double>(i));
        const double mod = std::abs(law.cf(theta));
        rep.max_cf_modulus = std::max(rep.max_cf_modulus, mod);
        if (mod > 1.0 + 1e-10) {
            fail("characteristic function modulus exceeds 1", theta, mod);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const FactorLaw& law) {
    j = nlohmann::json{{"atom0", law.atom0()},
                       {"rates", law.rates()},
                       {"weights", law.weights()},
                       {"truncation", law.truncation()},
                       {"tail_bound", law.tail_bound()}};
}

void from_json(const nlohmann::json& j, FactorLaw& law) {
    law = FactorLaw(j.at("atom0").get<double>(), j.at("rates").get<std::vector<double>>(),
                    j.at("weights").get<std::vector<double>>(), j.at("truncation").get<std::size_t>(),
                    j.at("tail_bound").get<double>());
}

// ---------------------------------------------------------------------------
// Pairs

FactorizationPair build_factorization(const LevyModel& model, double lambda, const FactorizationOptions& opt) {
    const RootLadder ladder = locate_roots(model, lambda, opt.K, opt.roots);
    FactorizationPair pair;
    pair.lambda = lambda;
    pair.sup_law = factor_coefficients(ladder, model, Side::sup);
    pair.inf_law = factor_coefficients(ladder, model, Side::inf);
    if (opt.build_samplers) {
        pair.sup_law.build_sampler();
        pair.inf_law.build_sampler();
    }
    return pair;
}

FactorizationPair brownian_factorization(double mu, double sigma, double lambda, bool build_samplers) {
    if (!(sigma > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("brownian_factorization: sigma and lambda must be positive");
    }
    const double root = std::sqrt(mu * mu + 2.0 * lambda * sigma * sigma);
    FactorizationPair pair;
    pair.lambda = lambda;
    pair.sup_law = FactorLaw::exponential((-mu + root) / (sigma * sigma));
    pair.inf_law = FactorLaw::exponential((mu + root) / (sigma * sigma));
    if (build_samplers) {
        pair.sup_law.build_sampler();
        pair.inf_law.build_sampler();
    }
    return pair;
}

double wiener_hopf_identity_error(const FactorizationPair& pair, const LevyModel& model,
                                  const std::vector<double>& thetas) {
    double worst = 0.0;
    for (double th : thetas) {
        const cplx target = pair.lambda / (pair.lambda + model.psi(cplx(th, 0.0)));
        const cplx got = pair.sup_law.cf(th) * pair.inf_law.cf(-th);
        worst = std::max(worst, std::abs(got - target) / std::abs(target));
    }
    return worst;
}

std::string factor_cache_key(const LevyModel& model, double lambda, std::size_t K, Side side) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", lambda);
    std::string lam(buf);
    std::replace(lam.begin(), lam.end(), '.', 'p');
    std::replace(lam.begin(), lam.end(), '+', '_');
    return model.hash() + "-l" + lam + "-K" + std::to_string(K) + "-" + side_name(side);
}

FactorLawCache::FactorLawCache(std::string directory) : dir_(std::move(directory)) {
    std::filesystem::create_directories(dir_);
}

std::optional<FactorLaw> FactorLawCache::load(const std::string& key) const {
    std::ifstream in(std::filesystem::path(dir_) / (key + ".json"));
    if (!in) {
        return std::nullopt;
    }
    try {
        return nlohmann::json::parse(in).get<FactorLaw>();
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void FactorLawCache::store(const std::string& key, const FactorLaw& law) const {
    std::ofstream out(std::filesystem::path(dir_) / (key + ".json"));
    out << nlohmann::json(law).dump();
}

}  // namespace whmc
