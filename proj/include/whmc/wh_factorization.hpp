#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "whmc/levy_models.hpp"
#include "whmc/rng.hpp"

namespace whmc {

class RootLocationError : public std::runtime_error {
public:
    RootLocationError(const std::string& what, Side side, std::size_t index)
        : std::runtime_error(what), side_(side), index_(index) {}
    Side side() const { return side_; }
    std::size_t index() const { return index_; }

private:
    Side side_;
    std::size_t index_;
};

class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LawValidityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Bracket {
    long double lo = 0.0L;
    long double hi = 0.0L;
};

// Roots of lambda + Psi(i z) = 0. plus_roots are positive (they build the law
// of minus the infimum), minus_roots are negative (law of the supremum).
// Index n = 0..count on each side.
struct RootLadder {
    double lambda = 0.0;
    std::size_t count = 0;
    std::vector<long double> plus_roots;
    std::vector<long double> minus_roots;
    std::vector<Bracket> plus_brackets;
    std::vector<Bracket> minus_brackets;
    std::vector<long double> plus_residuals;
    std::vector<long double> minus_residuals;

    const std::vector<long double>& roots(Side side) const { return side == Side::sup ? minus_roots : plus_roots; }
    const std::vector<Bracket>& brackets(Side side) const {
        return side == Side::sup ? minus_brackets : plus_brackets;
    }
};

struct RootSolverOptions {
    long double bisection_rel_width = 1e-13L;
    long double endpoint_inset = 1e-9L;
    int newton_steps = 3;
    // index from which tabulated asymptotics seed Newton (hypergeometric family)
    std::size_t asymptotic_from = 32;
};

RootLadder locate_roots(const LevyModel& model, double lambda, std::size_t K, const RootSolverOptions& opt = {});
RootLadder locate_roots_beta(const BetaFamilyParams& params, double lambda, std::size_t K);
RootLadder locate_roots_hypergeometric(const HypergeometricParams& params, double lambda, std::size_t K);

// Roots on one side only, as magnitudes, with brackets.
std::vector<long double> locate_side_roots(const LevyModel& model, double lambda, std::size_t K, Side side,
                                           std::vector<Bracket>* brackets = nullptr,
                                           const RootSolverOptions& opt = {});

constexpr double kTailWarnThreshold = 1e-8;

// Distribution on [0, inf) with an atom at 0 and survival function
// S(x) = sum_k weights[k] exp(-rates[k] x) on x > 0.
class FactorLaw {
public:
    FactorLaw() = default;
    // Builds the law and renormalizes so that S(0) = 1 - atom0 exactly.
    FactorLaw(double atom0, std::vector<double> rates, std::vector<double> weights, std::size_t truncation = 0,
              double tail_bound = 0.0);

    static FactorLaw exponential(double rate, double atom0 = 0.0);
    static FactorLaw point_mass_at_zero();

    double atom0() const { return atom0_; }
    const std::vector<double>& rates() const { return rates_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t truncation() const { return truncation_; }
    double tail_bound() const { return tail_bound_; }
    bool tail_warning() const { return tail_bound_ > kTailWarnThreshold; }

    double survival(double x) const;
    double density(double x) const;
    double cdf(double x) const { return 1.0 - survival(x); }
    double mean() const;
    // E[exp(i theta Y)]
    cplx cf(double theta) const;
    // E[exp(-s Y)] for s > -min rate
    double laplace(double s) const;
    double min_rate() const;

    double quantile(double u) const;
    // Quantile from the upper tail probability v = 1 - u; avoids cancellation for small v.
    double quantile_upper(double v) const;

    // Tabulated inverse for fast sampling; exact quantile beyond the table.
    void build_sampler(std::size_t nodes = 4096, double tau_max = 40.0);
    bool has_sampler() const { return !table_x_.empty(); }
    // Draw from the upper-tail uniform v in (0,1).
    double sample_upper(double v) const;

private:
    double atom0_ = 1.0;
    std::vector<double> rates_;
    std::vector<double> weights_;
    std::vector<double> dens_coef_;
    std::size_t truncation_ = 0;
    double tail_bound_ = 0.0;

    double tau_max_ = 0.0;
    double table_step_ = 0.0;
    std::vector<double> table_x_;
    std::vector<double> table_dx_;
};

double factor_survival(const FactorLaw& law, double x);
cplx factor_cf(const FactorLaw& law, double theta);
double quantile(const FactorLaw& law, double u);
double sample_factor(const FactorLaw& law, RandomStream& rng);

// Truncation details recorded by factor_coefficients.
struct CoefficientDiagnostics {
    std::size_t numerator_poles = 0;
    double raw_atom = 0.0;        // 1 - sum of raw weights before clipping
    double product_atom = 0.0;    // product formula prod rho_n / P_{n+1}
    double weight_sum = 0.0;
};

FactorLaw factor_coefficients(const RootLadder& ladder, const LevyModel& model, Side side,
                              CoefficientDiagnostics* diag = nullptr);

// Weights from explicit roots (magnitudes) and poles, n_poles numerator factors.
std::vector<long double> product_weights(const std::vector<long double>& roots, const PoleLadder& poles,
                                         std::size_t n_poles);

struct ValidationReport {
    bool pass = true;
    bool warn = false;
    std::string failure;
    double worst_x = 0.0;
    double worst_value = 0.0;
    double mass_error = 0.0;
    double max_cf_modulus = 0.0;
};

ValidationReport validate_law(const FactorLaw& law, const std::vector<double>& grid);
std::vector<double> default_validation_grid(const FactorLaw& law, std::size_t points = 400);

void to_json(nlohmann::json& j, const FactorLaw& law);
void from_json(const nlohmann::json& j, FactorLaw& law);

struct FactorizationPair {
    double lambda = 0.0;
    FactorLaw sup_law;
    FactorLaw inf_law;
};

struct FactorizationOptions {
    std::size_t K = 128;
    bool build_samplers = true;
    RootSolverOptions roots;
};

FactorizationPair build_factorization(const LevyModel& model, double lambda, const FactorizationOptions& opt = {});

// Brownian motion with drift mu and volatility sigma: both factors exponential,
// rates (-mu + sqrt(mu^2 + 2 lambda sigma^2)) / sigma^2 and (mu + sqrt(...)) / sigma^2.
FactorizationPair brownian_factorization(double mu, double sigma, double lambda, bool build_samplers = true);

// Maximum relative error of cf_sup(theta) cf_inf(-theta) against lambda / (lambda + Psi(theta)).
double wiener_hopf_identity_error(const FactorizationPair& pair, const LevyModel& model,
                                  const std::vector<double>& thetas);

std::string factor_cache_key(const LevyModel& model, double lambda, std::size_t K, Side side);

// File cache of factor laws under a directory, keyed by factor_cache_key.
class FactorLawCache {
public:
    explicit FactorLawCache(std::string directory);
    std::optional<FactorLaw> load(const std::string& key) const;
    void store(const std::string& key, const FactorLaw& law) const;

private:
    std::string dir_;
};

}  // namespace whmc
