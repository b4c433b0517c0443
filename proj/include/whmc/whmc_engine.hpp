#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "whmc/levy_models.hpp"
#include "whmc/rng.hpp"
#include "whmc/wh_factorization.hpp"

namespace whmc {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    double t = 1.0;
    std::size_t n_steps = 100;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    std::size_t K = 128;
    unsigned workers = 1;
    // paths per work unit; partial sums are merged in unit order, so results
    // do not depend on the number of workers
    std::size_t chunk = 4096;

    double lambda() const { return static_cast<double>(n_steps) / t; }
};

struct PathFunctionalSample {
    double V = 0.0;
    double J = 0.0;
    double K = 0.0;
    double Jt = 0.0;
    double Kt = 0.0;
};

struct PairSample {
    double V = 0.0;
    double J = 0.0;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::size_t rejected = 0;
};

void to_json(nlohmann::json& j, const Estimate& e);

// Random-number layout of one recursion step: block 0 carries the uniforms for
// S and I, block 1 the Bernoulli mark and the first jump uniform, block 2 the
// second jump uniform.
namespace stream_layout {
constexpr std::uint32_t factors = 0;
constexpr std::uint32_t mark_and_jump = 1;
constexpr std::uint32_t jump_extra = 2;
}  // namespace stream_layout

PairSample simulate_pair(const FactorizationPair& laws, std::size_t n, const CounterRng& rng, std::uint64_t path);
PathFunctionalSample simulate_triple(const FactorizationPair& laws, std::size_t n, const CounterRng& rng,
                                     std::uint64_t path);

enum class JumpKind { none, normal, two_sided_exponential, empirical };

struct JumpDistribution {
    JumpKind kind = JumpKind::none;
    // normal
    double mean = 0.0;
    double sd = 1.0;
    // two-sided exponential: with probability p_up an Exp(eta_up) jump, else -Exp(eta_down)
    double p_up = 0.5;
    double eta_up = 1.0;
    double eta_down = 1.0;
    // empirical: uniform draw from the listed values
    std::vector<double> values;

    static JumpDistribution normal(double mean, double sd);
    static JumpDistribution two_sided_exponential(double p_up, double eta_up, double eta_down);
    static JumpDistribution empirical(std::vector<double> values);

    void validate() const;
    double sample(double u1, double u2) const;
    double expectation() const;
};

struct JumpAugmentation {
    double gamma = 0.0;
    JumpDistribution jumps;
};

struct AugmentedSample {
    double V = 0.0;
    double J = 0.0;
    std::size_t steps = 0;
};

// laws must be built at rate lambda + gamma.
AugmentedSample simulate_jump_augmented(const FactorizationPair& laws, const JumpAugmentation& aug, std::size_t n,
                                        double lambda, const CounterRng& rng, std::uint64_t path);

// Sum of n exponential(lambda) draws on a stream separate from the recursion's.
double sample_gamma_time(std::size_t n, double lambda, const CounterRng& rng, std::uint64_t path);

// Runs eval(path, out) for every path and accumulates each of the n_outputs
// values. Non-finite values are rejected per output; more than 0.1% rejections
// raise SimulationError.
std::vector<Estimate> estimate_functionals(std::size_t n_outputs,
                                           const std::function<void(std::uint64_t, double*)>& eval,
                                           const SimConfig& config);

template <class Sample>
Estimate estimate_functional(const std::function<Sample(std::uint64_t)>& sampler,
                             const std::function<double(const Sample&)>& payoff, const SimConfig& config) {
    return estimate_functionals(
               1, [&](std::uint64_t path, double* out) { out[0] = payoff(sampler(path)); }, config)
        .front();
}

struct ConvergenceRow {
    std::size_t n = 0;
    double value = 0.0;
    double std_error = 0.0;
};

using PairPayoff = std::function<double(const PairSample&)>;

// One estimate per n, with factor laws rebuilt at rate n / t.
std::vector<ConvergenceRow> convergence_study(const LevyModel& model, const PairPayoff& payoff, double t,
                                              const std::vector<std::size_t>& n_list, const SimConfig& base);

void write_samples_csv(std::ostream& out, const std::vector<PathFunctionalSample>& samples);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

}  // namespace whmc
