#include "whmc/levy_models.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace whmc {

namespace {

using special::beta;
using special::beta_dx;

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

template <class T> std::complex<T> imag_unit() { return std::complex<T>(T(0), T(1)); }

// Beta-family exponent and its derivative in precision T.
template <class T>
std::complex<T> psi_beta_impl(const BetaFamilyParams& p, long double b01, long double b02, std::complex<T> theta) {
    using Z = std::complex<T>;
    const Z i = imag_unit<T>();
    const T s2 = T(p.sigma) * T(p.sigma);
    Z out = i * T(p.a) * theta + T(0.5) * s2 * theta * theta;
    const Z x1 = Z(T(p.alpha1)) - i * theta / T(p.beta1);
    const Z x2 = Z(T(p.alpha2)) + i * theta / T(p.beta2);
    out += T(p.c1) / T(p.beta1) * (Z(T(b01)) - beta(x1, Z(T(1) - T(p.lambda1))));
    out += T(p.c2) / T(p.beta2) * (Z(T(b02)) - beta(x2, Z(T(1) - T(p.lambda2))));
    return out;
}

template <class T> std::complex<T> dpsi_beta_impl(const BetaFamilyParams& p, std::complex<T> theta) {
    using Z = std::complex<T>;
    const Z i = imag_unit<T>();
    const T s2 = T(p.sigma) * T(p.sigma);
    const Z x1 = Z(T(p.alpha1)) - i * theta / T(p.beta1);
    const Z x2 = Z(T(p.alpha2)) + i * theta / T(p.beta2);
    Z out = i * T(p.a) + s2 * theta;
    out += T(p.c1) / (T(p.beta1) * T(p.beta1)) * i * beta_dx(x1, Z(T(1) - T(p.lambda1)));
    out -= T(p.c2) / (T(p.beta2) * T(p.beta2)) * i * beta_dx(x2, Z(T(1) - T(p.lambda2)));
    return out;
}

template <class T>
std::complex<T> phi_impl(const BetaSubordinatorParams& p, long double b0, std::complex<T> s) {
    using Z = std::complex<T>;
    const T x0 = T(1) - T(p.alpha) + T(p.gamma);
    return Z(T(p.kappa)) + T(p.delta) * s +
           T(p.c) / T(p.beta) * (Z(T(b0)) - beta(Z(x0) + s / T(p.beta), Z(-T(p.gamma))));
}

template <class T> std::complex<T> dphi_impl(const BetaSubordinatorParams& p, std::complex<T> s) {
    using Z = std::complex<T>;
    const T x0 = T(1) - T(p.alpha) + T(p.gamma);
    return Z(T(p.delta)) - T(p.c) / (T(p.beta) * T(p.beta)) * beta_dx(Z(x0) + s / T(p.beta), Z(-T(p.gamma)));
}

template <class T>
std::complex<T> psi_hyper_impl(const HypergeometricParams& p, long double b01, long double b02, std::complex<T> theta) {
    using Z = std::complex<T>;
    const Z i = imag_unit<T>();
    const T s2 = T(p.sigma) * T(p.sigma);
    return T(p.d) * i * theta + T(0.5) * s2 * theta * theta + phi_impl<T>(p.sub1, b01, -i * theta) *
                                                                   phi_impl<T>(p.sub2, b02, i * theta);
}

template <class T>
std::complex<T> dpsi_hyper_impl(const HypergeometricParams& p, long double b01, long double b02, std::complex<T> theta) {
    using Z = std::complex<T>;
    const Z i = imag_unit<T>();
    const T s2 = T(p.sigma) * T(p.sigma);
    const Z s1 = -i * theta;
    const Z s2arg = i * theta;
    return T(p.d) * i + s2 * theta - i * dphi_impl<T>(p.sub1, s1) * phi_impl<T>(p.sub2, b02, s2arg) +
           i * phi_impl<T>(p.sub1, b01, s1) * dphi_impl<T>(p.sub2, s2arg);
}

long double subordinator_b0(const BetaSubordinatorParams& p) {
    const long double x0 = 1.0L - p.alpha + p.gamma;
    return special::beta<long double>(x0, -static_cast<long double>(p.gamma));
}

// e^{alpha beta x} / (e^{beta x} - 1)^{1 + gamma} for x > 0 and its derivative
double subordinator_density_kernel(const BetaSubordinatorParams& p, double beta, double x) {
    const double em1 = std::expm1(beta * x);
    return std::exp(p.alpha * beta * x - (1.0 + p.gamma) * std::log(em1));
}

double subordinator_density_kernel_dx(const BetaSubordinatorParams& p, double beta, double x) {
    const double em1 = std::expm1(beta * x);
    const double k = subordinator_density_kernel(p, beta, x);
    return beta * k * (p.alpha - (1.0 + p.gamma) * (em1 + 1.0) / em1);
}

// Positive half-line density of the hypergeometric Levy measure.
double hyper_density_positive(const HypergeometricParams& p, double x) {
    const BetaSubordinatorParams& h1 = p.sub1;
    const BetaSubordinatorParams& h2 = p.sub2;
    const double b = h1.beta;
    const double rho = 2.0 + h1.gamma + h2.gamma - h1.alpha - h2.alpha;
    const double cpar = rho - h2.gamma;
    if (cpar <= 0.0 && std::fabs(cpar - std::nearbyint(cpar)) < 1e-12) {
        throw EvaluationError("hypergeometric density: rho - gamma2 is a nonpositive integer");
    }
    const double w = std::exp(-b * x);
    const double f21 = special::hyp2f1(1.0 + h1.gamma, rho, cpar, w);
    const double brho = static_cast<double>(special::beta<long double>(rho, -static_cast<long double>(h2.gamma)));
    const double term1 = -(h1.c * h2.c / b) * brho * std::exp(-b * x * (1.0 + h1.gamma - h1.alpha)) * f21;
    const double mass2 =
        h2.kappa + (h2.c / b) * static_cast<double>(special::beta<long double>(1.0L + h2.gamma - h2.alpha,
                                                                                -static_cast<long double>(h2.gamma)));
    const double term2 = h1.c * mass2 * subordinator_density_kernel(h1, b, x);
    const double term3 = -h2.delta * h1.c * subordinator_density_kernel_dx(h1, b, x);
    return term1 + term2 + term3;
}

HypergeometricParams reflect_params(const HypergeometricParams& p) {
    HypergeometricParams q = p;
    q.d = -p.d;
    q.sub1 = p.sub2;
    q.sub2 = p.sub1;
    return q;
}

BetaFamilyParams reflect_params(const BetaFamilyParams& p) {
    BetaFamilyParams q;
    q.a = -p.a;
    q.sigma = p.sigma;
    q.c1 = p.c2;
    q.alpha1 = p.alpha2;
    q.beta1 = p.beta2;
    q.lambda1 = p.lambda2;
    q.c2 = p.c1;
    q.alpha2 = p.alpha1;
    q.beta2 = p.beta1;
    q.lambda2 = p.lambda1;
    return q;
}

// Large-n root asymptotics on the positive half-axis (the inf side).
std::optional<long double> hyper_asymptotic_plus(const HypergeometricParams& p, std::size_t n) {
    const BetaSubordinatorParams& h1 = p.sub1;
    const BetaSubordinatorParams& h2 = p.sub2;
    const long double b = h2.beta;
    const long double s2 = static_cast<long double>(p.sigma) * p.sigma;
    const bool has_sigma = p.sigma != 0.0;
    const bool has_d1 = h1.delta > 0.0;
    const bool has_d2 = h2.delta > 0.0;
    const long double g1 = h1.gamma;
    const long double g2 = h2.gamma;
    const long double pi = std::numbers::pi_v<long double>;
    // Offsets are relative to the lower end of bracket n, beta (n + gamma2 - alpha2);
    // the tabulated omega2 = 1 + gamma2 corresponds to this with the index shifted by one.
    long double omega = g2;
    long double c = 0.0L;
    long double varrho = g2 - 1.0L;
    const auto gam = [](long double z) { return special::gamma<long double>(z); };
    if (has_sigma && has_d1 && has_d2) {
        c = 2.0L * h1.delta * h2.c / (b * gam(1.0L + g2) * (s2 + 2.0L * h1.delta * h2.delta));
    } else if (!has_sigma && has_d1 && has_d2) {
        c = h2.c / (b * gam(1.0L + g2) * h2.delta);
    } else if (has_sigma && has_d2 && !has_d1) {
        c = 2.0L * h1.c * h2.c * gam(1.0L - g1) / (std::pow(b, 3.0L + g1 - g2) * gam(1.0L + g2) * g1 * s2);
        varrho = g1 + g2 - 2.0L;
    } else if (has_sigma && has_d1 && !has_d2) {
        c = 2.0L * h1.delta * h2.c / (b * gam(1.0L + g2) * s2);
    } else if (!has_sigma && has_d2 && !has_d1) {
        c = h2.c / (b * h2.delta * gam(1.0L + g2));
    } else if (!has_sigma && has_d1 && !has_d2) {
        return std::nullopt;
    } else if (has_sigma && !has_d1 && !has_d2) {
        c = 2.0L * h1.c * h2.c * gam(1.0L - g1) / (std::pow(b, 3.0L + g1 - g2) * gam(1.0L + g2) * g1 * s2);
        varrho = g1 + g2 - 2.0L;
    } else {
        omega = 1.0L;
        varrho = -g2;
        const long double bb = special::beta<long double>(1.0L + g2 - h2.alpha, -g2);
        c = b * b * g2 / (h2.c * gam(1.0L - g2)) * std::sin(pi * g2) / pi * (h2.kappa + h2.c / b * bb);
    }
    const long double nn = static_cast<long double>(n);
    const long double guess = b * (nn - h2.alpha + omega) + c * std::pow(nn, varrho);
    if (!std::isfinite(guess)) {
        return std::nullopt;
    }
    return guess;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void validate(const BetaFamilyParams& p) {
    if (!finite_all({p.a, p.sigma, p.c1, p.alpha1, p.beta1, p.lambda1, p.c2, p.alpha2, p.beta2, p.lambda2})) {
        throw ParameterError("beta family: non-finite parameter");
    }
    if (p.sigma < 0.0) {
        throw ParameterError("beta family: sigma must be >= 0");
    }
    if (p.c1 <= 0.0 || p.c2 <= 0.0) {
        throw ParameterError("beta family: c1, c2 must be > 0");
    }
    if (p.alpha1 <= 0.0 || p.alpha2 <= 0.0) {
        throw ParameterError("beta family: alpha1, alpha2 must be > 0");
    }
    if (p.beta1 <= 0.0 || p.beta2 <= 0.0) {
        throw ParameterError("beta family: beta1, beta2 must be > 0");
    }
    for (double lam : {p.lambda1, p.lambda2}) {
        if (!(lam > 0.0 && lam < 3.0)) {
            throw ParameterError("beta family: lambda must lie in (0, 3)");
        }
        if (std::fabs(lam - 1.0) < 1e-9 || std::fabs(lam - 2.0) < 1e-9) {
            throw ParameterError("beta family: lambda within 1e-9 of 1 or 2 is excluded");
        }
    }
}

void validate(const BetaSubordinatorParams& p) {
    if (!finite_all({p.c, p.alpha, p.beta, p.gamma, p.delta, p.kappa})) {
        throw ParameterError("beta subordinator: non-finite parameter");
    }
    if (p.c <= 0.0) {
        throw ParameterError("beta subordinator: c must be > 0");
    }
    if (p.beta <= 0.0) {
        throw ParameterError("beta subordinator: beta must be > 0");
    }
    if (!(p.gamma < 1.0) || std::fabs(p.gamma) < 1e-9) {
        throw ParameterError("beta subordinator: gamma must lie in (-inf, 0) U (0, 1)");
    }
    if (p.delta < 0.0 || p.kappa < 0.0) {
        throw ParameterError("beta subordinator: delta and kappa must be >= 0");
    }
    if (!(1.0 - p.alpha + p.gamma > 1e-12)) {
        throw ParameterError("beta subordinator: requires 1 - alpha + gamma > 0");
    }
}

void validate(const HypergeometricParams& p) {
    if (!finite_all({p.d, p.sigma})) {
        throw ParameterError("hypergeometric: non-finite parameter");
    }
    if (p.sigma < 0.0) {
        throw ParameterError("hypergeometric: sigma must be >= 0");
    }
    validate(p.sub1);
    validate(p.sub2);
    if (p.sub1.beta != p.sub2.beta) {
        throw ParameterError("hypergeometric: sub1 and sub2 must share beta");
    }
    if (p.sub1.kappa * p.sub2.kappa != 0.0) {
        throw ParameterError("hypergeometric: at most one subordinator may be killed");
    }
}

LevyModel LevyModel::beta_family(const BetaFamilyParams& p) {
    validate(p);
    LevyModel m;
    m.kind_ = ModelKind::beta_family;
    m.params_ = p;
    m.precompute();
    return m;
}

LevyModel LevyModel::hypergeometric(const HypergeometricParams& p) {
    validate(p);
    LevyModel m;
    m.kind_ = ModelKind::hypergeometric;
    m.params_ = p;
    m.precompute();
    return m;
}

void LevyModel::precompute() {
    if (kind_ == ModelKind::beta_family) {
        const auto& p = std::get<BetaFamilyParams>(params_);
        b0_1_ = special::beta<long double>(p.alpha1, 1.0L - p.lambda1);
        b0_2_ = special::beta<long double>(p.alpha2, 1.0L - p.lambda2);
    } else {
        const auto& p = std::get<HypergeometricParams>(params_);
        b0_1_ = subordinator_b0(p.sub1);
        b0_2_ = subordinator_b0(p.sub2);
    }
}

const BetaFamilyParams& LevyModel::beta_params() const {
    if (kind_ != ModelKind::beta_family) {
        throw std::logic_error("model is not a beta-family model");
    }
    return std::get<BetaFamilyParams>(params_);
}

const HypergeometricParams& LevyModel::hyper_params() const {
    if (kind_ != ModelKind::hypergeometric) {
        throw std::logic_error("model is not a hypergeometric model");
    }
    return std::get<HypergeometricParams>(params_);
}

double LevyModel::drift() const {
    return kind_ == ModelKind::beta_family ? beta_params().a : hyper_params().d;
}

double LevyModel::gaussian_sigma() const {
    return kind_ == ModelKind::beta_family ? beta_params().sigma : hyper_params().sigma;
}

LevyModel LevyModel::with_drift(double drift) const {
    if (kind_ == ModelKind::beta_family) {
        BetaFamilyParams p = beta_params();
        p.a = drift;
        return beta_family(p);
    }
    HypergeometricParams p = hyper_params();
    p.d = drift;
    return hypergeometric(p);
}

cplx_ext LevyModel::psi(cplx_ext theta) const {
    if (kind_ == ModelKind::beta_family) {
        return psi_beta_impl<long double>(std::get<BetaFamilyParams>(params_), b0_1_, b0_2_, theta);
    }
    return psi_hyper_impl<long double>(std::get<HypergeometricParams>(params_), b0_1_, b0_2_, theta);
}

cplx LevyModel::psi(cplx theta) const {
    if (kind_ == ModelKind::beta_family) {
        return psi_beta_impl<double>(std::get<BetaFamilyParams>(params_), b0_1_, b0_2_, theta);
    }
    return psi_hyper_impl<double>(std::get<HypergeometricParams>(params_), b0_1_, b0_2_, theta);
}

cplx LevyModel::dpsi(cplx theta) const {
    if (kind_ == ModelKind::beta_family) {
        return dpsi_beta_impl<double>(std::get<BetaFamilyParams>(params_), theta);
    }
    return dpsi_hyper_impl<double>(std::get<HypergeometricParams>(params_), b0_1_, b0_2_, theta);
}

cplx_ext LevyModel::dpsi(cplx_ext theta) const {
    if (kind_ == ModelKind::beta_family) {
        return dpsi_beta_impl<long double>(std::get<BetaFamilyParams>(params_), theta);
    }
    return dpsi_hyper_impl<long double>(std::get<HypergeometricParams>(params_), b0_1_, b0_2_, theta);
}

long double LevyModel::psi_axis(long double z) const { return psi(cplx_ext(0.0L, z)).real(); }

long double LevyModel::dpsi_axis(long double z) const {
    // d/dz Psi(iz) = i Psi'(iz)
    const cplx_ext d = dpsi(cplx_ext(0.0L, z));
    return -d.imag();
}

PoleLadder LevyModel::poles(Side side) const {
    if (kind_ == ModelKind::beta_family) {
        const auto& p = beta_params();
        if (side == Side::sup) {
            return {static_cast<long double>(p.beta1) * p.alpha1, p.beta1};
        }
        return {static_cast<long double>(p.beta2) * p.alpha2, p.beta2};
    }
    const auto& p = hyper_params();
    const BetaSubordinatorParams& h = side == Side::sup ? p.sub1 : p.sub2;
    return {static_cast<long double>(h.beta) * (1.0L + h.gamma - h.alpha), h.beta};
}

std::optional<long double> LevyModel::asymptotic_root(Side side, std::size_t n) const {
    if (kind_ != ModelKind::hypergeometric) {
        return std::nullopt;
    }
    const HypergeometricParams& p = hyper_params();
    return side == Side::inf ? hyper_asymptotic_plus(p, n) : hyper_asymptotic_plus(reflect_params(p), n);
}

double LevyModel::levy_density(double x) const {
    if (kind_ == ModelKind::beta_family) {
        return levy_density_beta(beta_params(), x);
    }
    return levy_density_hypergeometric(hyper_params(), x);
}

LevyModel LevyModel::reflected() const {
    if (kind_ == ModelKind::beta_family) {
        return beta_family(reflect_params(beta_params()));
    }
    return hypergeometric(reflect_params(hyper_params()));
}

std::string LevyModel::hash() const {
    std::ostringstream os;
    if (kind_ == ModelKind::beta_family) {
        const auto& p = beta_params();
        os << "beta_family";
        for (double v : {p.a, p.sigma, p.c1, p.alpha1, p.beta1, p.lambda1, p.c2, p.alpha2, p.beta2, p.lambda2}) {
            os << ':' << fmt(v);
        }
    } else {
        const auto& p = hyper_params();
        os << "hypergeometric:" << fmt(p.d) << ':' << fmt(p.sigma);
        for (const auto* h : {&p.sub1, &p.sub2}) {
            for (double v : {h->c, h->alpha, h->beta, h->gamma, h->delta, h->kappa}) {
                os << ':' << fmt(v);
            }
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
    return buf;
}

cplx psi_beta(const BetaFamilyParams& p, cplx theta) { return LevyModel::beta_family(p).psi(theta); }

double levy_density_beta(const BetaFamilyParams& p, double x) {
    if (x == 0.0) {
        throw std::domain_error("levy_density_beta: x = 0");
    }
    if (x > 0.0) {
        return p.c1 * std::exp(-p.alpha1 * p.beta1 * x - p.lambda1 * std::log(-std::expm1(-p.beta1 * x)));
    }
    const double y = -x;
    return p.c2 * std::exp(-p.alpha2 * p.beta2 * y - p.lambda2 * std::log(-std::expm1(-p.beta2 * y)));
}

template <class T>
std::complex<T> phi_beta_subordinator(const BetaSubordinatorParams& p, std::complex<T> s) {
    validate(p);
    return phi_impl<T>(p, subordinator_b0(p), s);
}

template std::complex<double> phi_beta_subordinator<double>(const BetaSubordinatorParams&, std::complex<double>);
template std::complex<long double> phi_beta_subordinator<long double>(const BetaSubordinatorParams&,
                                                                      std::complex<long double>);

double phi_beta_subordinator(const BetaSubordinatorParams& p, double theta) {
    return static_cast<double>(phi_beta_subordinator<long double>(p, cplx_ext(theta, 0.0L)).real());
}

cplx psi_hypergeometric(const HypergeometricParams& p, cplx theta) {
    return LevyModel::hypergeometric(p).psi(theta);
}

double levy_density_hypergeometric(const HypergeometricParams& p, double x) {
    if (x == 0.0) {
        throw std::domain_error("levy_density_hypergeometric: x = 0");
    }
    validate(p);
    if (x > 0.0) {
        return hyper_density_positive(p, x);
    }
    return hyper_density_positive(reflect_params(p), -x);
}

LevyModel calibrate_risk_neutral_drift(const LevyModel& model, double r) {
    if (model.kind() == ModelKind::beta_family) {
        const auto& p = model.beta_params();
        if (!(p.alpha1 * p.beta1 > 1.0)) {
            throw CalibrationError("calibration: E[exp(X_1)] is infinite (requires alpha1 * beta1 > 1)");
        }
    } else {
        const auto& p = model.hyper_params();
        if (!(1.0 - p.sub1.alpha + p.sub1.gamma - 1.0 / p.sub1.beta > 0.0)) {
            throw CalibrationError("calibration: E[exp(X_1)] is infinite (Phi1(-1) diverges)");
        }
    }
    const LevyModel base = model.with_drift(0.0);
    cplx_ext psi0;
    try {
        psi0 = base.psi(cplx_ext(0.0L, -1.0L));
    } catch (const EvaluationError& e) {
        throw CalibrationError(std::string("calibration: Psi(-i) not finite: ") + e.what());
    }
    if (!std::isfinite(static_cast<double>(psi0.real()))) {
        throw CalibrationError("calibration: Psi(-i) not finite");
    }
    // Psi(-i) = a + Psi0(-i)
    const long double a = -static_cast<long double>(r) - psi0.real();
    return model.with_drift(static_cast<double>(a));
}

double effective_gaussian_variance(const LevyModel& model) {
    if (model.kind() == ModelKind::beta_family) {
        const double s = model.beta_params().sigma;
        return s * s;
    }
    const auto& p = model.hyper_params();
    return p.sigma * p.sigma + 2.0 * p.sub1.delta * p.sub2.delta;
}

namespace {

template <class Params>
void read_fields(const nlohmann::json& j, const std::vector<std::pair<const char*, double Params::*>>& fields,
                 Params& p, const char* what) {
    if (!j.is_object()) {
        throw ParameterError(std::string(what) + ": expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& [name, member] : fields) {
            if (key == name) {
                if (!value.is_number()) {
                    throw ParameterError(std::string(what) + ": '" + key + "' must be a number");
                }
                p.*member = value.template get<double>();
                known = true;
            }
        }
        if (!known) {
            throw ParameterError(std::string(what) + ": unknown parameter '" + key + "'");
        }
    }
}

const std::vector<std::pair<const char*, double BetaFamilyParams::*>>& beta_fields() {
    static const std::vector<std::pair<const char*, double BetaFamilyParams::*>> f{
        {"a", &BetaFamilyParams::a},           {"sigma", &BetaFamilyParams::sigma},
        {"c1", &BetaFamilyParams::c1},         {"alpha1", &BetaFamilyParams::alpha1},
        {"beta1", &BetaFamilyParams::beta1},   {"lambda1", &BetaFamilyParams::lambda1},
        {"c2", &BetaFamilyParams::c2},         {"alpha2", &BetaFamilyParams::alpha2},
        {"beta2", &BetaFamilyParams::beta2},   {"lambda2", &BetaFamilyParams::lambda2}};
    return f;
}

const std::vector<std::pair<const char*, double BetaSubordinatorParams::*>>& subordinator_fields() {
    static const std::vector<std::pair<const char*, double BetaSubordinatorParams::*>> f{
        {"c", &BetaSubordinatorParams::c},         {"alpha", &BetaSubordinatorParams::alpha},
        {"beta", &BetaSubordinatorParams::beta},   {"gamma", &BetaSubordinatorParams::gamma},
        {"delta", &BetaSubordinatorParams::delta}, {"kappa", &BetaSubordinatorParams::kappa}};
    return f;
}

}  // namespace

void to_json(nlohmann::json& j, const BetaFamilyParams& p) {
    j = nlohmann::json::object();
    for (const auto& [name, member] : beta_fields()) {
        j[name] = p.*member;
    }
}

void from_json(const nlohmann::json& j, BetaFamilyParams& p) { read_fields(j, beta_fields(), p, "beta family"); }

void to_json(nlohmann::json& j, const BetaSubordinatorParams& p) {
    j = nlohmann::json::object();
    for (const auto& [name, member] : subordinator_fields()) {
        j[name] = p.*member;
    }
}

void from_json(const nlohmann::json& j, BetaSubordinatorParams& p) {
    read_fields(j, subordinator_fields(), p, "beta subordinator");
}

void to_json(nlohmann::json& j, const HypergeometricParams& p) {
    j = nlohmann::json{{"d", p.d}, {"sigma", p.sigma}, {"sub1", p.sub1}, {"sub2", p.sub2}};
}

void from_json(const nlohmann::json& j, HypergeometricParams& p) {
    if (!j.is_object()) {
        throw ParameterError("hypergeometric: expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "d" || key == "sigma") {
            if (!value.is_number()) {
                throw ParameterError("hypergeometric: '" + key + "' must be a number");
            }
            (key == "d" ? p.d : p.sigma) = value.get<double>();
        } else if (key == "sub1" || key == "sub2") {
            from_json(value, key == "sub1" ? p.sub1 : p.sub2);
        } else {
            throw ParameterError("hypergeometric: unknown parameter '" + key + "'");
        }
    }
}

nlohmann::json model_to_json(const LevyModel& model) {
    if (model.kind() == ModelKind::beta_family) {
        return {{"kind", "beta_family"}, {"params", model.beta_params()}};
    }
    return {{"kind", "hypergeometric"}, {"params", model.hyper_params()}};
}

LevyModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ParameterError("model: expected {\"kind\": ..., \"params\": {...}}");
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "kind" && key != "params") {
            throw ParameterError("model: unknown field '" + key + "'");
        }
    }
    const std::string kind = j.at("kind").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    if (kind == "beta_family") {
        BetaFamilyParams p;
        from_json(params, p);
        return LevyModel::beta_family(p);
    }
    if (kind == "hypergeometric") {
        HypergeometricParams p;
        from_json(params, p);
        return LevyModel::hypergeometric(p);
    }
    throw ParameterError("model: unknown kind '" + kind + "'");
}

}  // namespace whmc
