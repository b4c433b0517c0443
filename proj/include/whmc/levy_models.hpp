#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "json.hpp"

#include "whmc/special_functions.hpp"

namespace whmc {

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using cplx = std::complex<double>;
using cplx_ext = std::complex<long double>;

struct BetaFamilyParams {
    double a = 0.0;
    double sigma = 0.0;
    double c1 = 1.0;
    double alpha1 = 1.0;
    double beta1 = 1.0;
    double lambda1 = 1.5;
    double c2 = 1.0;
    double alpha2 = 1.0;
    double beta2 = 1.0;
    double lambda2 = 1.5;

    bool bounded_variation() const { return sigma == 0.0 && lambda1 < 2.0 && lambda2 < 2.0; }
    bool infinite_activity() const { return lambda1 > 1.0 && lambda2 > 1.0; }
};

struct BetaSubordinatorParams {
    double c = 1.0;
    double alpha = 0.0;
    double beta = 1.0;
    double gamma = 0.5;
    double delta = 0.0;
    double kappa = 0.0;
};

struct HypergeometricParams {
    double d = 0.0;
    double sigma = 0.0;
    BetaSubordinatorParams sub1;
    BetaSubordinatorParams sub2;
};

enum class ModelKind { beta_family, hypergeometric };

// The two factor laws: sup is the law of the supremum (roots on the negative
// imaginary axis), inf is the law of minus the infimum (positive roots).
enum class Side { sup, inf };

// Poles of z -> Psi(iz) on one half-axis, in increasing magnitude:
// P_n = first + (n - 1) * spacing for n >= 1, with P_0 = 0 by convention.
// Root n of lambda + Psi(iz) = 0 on that side lies in (P_n, P_{n+1}).
struct PoleLadder {
    long double first = 0.0L;
    long double spacing = 1.0L;

    long double pole(std::size_t n) const {
        return n == 0 ? 0.0L : first + static_cast<long double>(n - 1) * spacing;
    }
};

void validate(const BetaFamilyParams& p);
void validate(const BetaSubordinatorParams& p);
void validate(const HypergeometricParams& p);

class LevyModel {
public:
    static LevyModel beta_family(const BetaFamilyParams& p);
    static LevyModel hypergeometric(const HypergeometricParams& p);

    ModelKind kind() const { return kind_; }
    const BetaFamilyParams& beta_params() const;
    const HypergeometricParams& hyper_params() const;

    // linear drift coefficient entering Psi as i * drift * theta
    double drift() const;
    LevyModel with_drift(double drift) const;
    double gaussian_sigma() const;

    cplx psi(cplx theta) const;
    cplx_ext psi(cplx_ext theta) const;
    cplx_ext dpsi(cplx_ext theta) const;
    cplx dpsi(cplx theta) const;

    // Psi(i z) for real z; real-valued away from the poles.
    long double psi_axis(long double z) const;
    // d/dz Psi(i z) for real z.
    long double dpsi_axis(long double z) const;

    PoleLadder poles(Side side) const;

    // Table-based large-n asymptotic for root n on the given side (magnitude),
    // when the parameter regime has one.
    std::optional<long double> asymptotic_root(Side side, std::size_t n) const;

    double levy_density(double x) const;

    // Model of -X.
    LevyModel reflected() const;

    std::string hash() const;

private:
    LevyModel() = default;
    void precompute();

    ModelKind kind_ = ModelKind::beta_family;
    std::variant<BetaFamilyParams, HypergeometricParams> params_;
    // B(alpha_i, 1 - lambda_i) for the beta family, B(1 - alpha_i + gamma_i, -gamma_i)
    // for the hypergeometric family
    long double b0_1_ = 0.0L;
    long double b0_2_ = 0.0L;
};

cplx psi_beta(const BetaFamilyParams& p, cplx theta);
double levy_density_beta(const BetaFamilyParams& p, double x);

double phi_beta_subordinator(const BetaSubordinatorParams& p, double theta);
template <class T>
std::complex<T> phi_beta_subordinator(const BetaSubordinatorParams& p, std::complex<T> s);

cplx psi_hypergeometric(const HypergeometricParams& p, cplx theta);
double levy_density_hypergeometric(const HypergeometricParams& p, double x);

LevyModel calibrate_risk_neutral_drift(const LevyModel& model, double r);

// Effective Gaussian variance: sigma^2 for the beta family and
// sigma^2 + 2 delta1 delta2 for the hypergeometric family.
double effective_gaussian_variance(const LevyModel& model);

void to_json(nlohmann::json& j, const BetaFamilyParams& p);
void from_json(const nlohmann::json& j, BetaFamilyParams& p);
void to_json(nlohmann::json& j, const BetaSubordinatorParams& p);
void from_json(const nlohmann::json& j, BetaSubordinatorParams& p);
void to_json(nlohmann::json& j, const HypergeometricParams& p);
void from_json(const nlohmann::json& j, HypergeometricParams& p);

// {"kind": "beta_family" | "hypergeometric", "params": {...}}; parameters
// missing from "params" take their defaults, unknown names are rejected.
nlohmann::json model_to_json(const LevyModel& model);
LevyModel model_from_json(const nlohmann::json& j);

}  // namespace whmc
