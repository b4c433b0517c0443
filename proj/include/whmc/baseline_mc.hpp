#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "whmc/levy_models.hpp"
#include "whmc/rng.hpp"

namespace whmc {

class GridRefinementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IncrementGridSpec {
    std::size_t points = std::size_t{1} << 16;
    // initial half-width of the grid in standard deviations of X_dt
    double sd_span = 40.0;
    // probability allowed in the outer 5% of the grid on either side
    double tail_tolerance = 1e-8;
    // most negative cell probability accepted before refining
    double negative_tolerance = 1e-8;
    std::size_t max_points = std::size_t{1} << 22;
};

void to_json(nlohmann::json& j, const IncrementGridSpec& g);

class IncrementTable {
public:
    IncrementTable(double dt, double x0, double dx, std::vector<double> cell_mass);

    double dt() const { return dt_; }
    // grid nodes are x0 + j dx; cell j covers [x_j - dx/2, x_j + dx/2]
    double x0() const { return x0_; }
    double dx() const { return dx_; }
    std::size_t size() const { return mass_.size(); }
    const std::vector<double>& cell_mass() const { return mass_; }
    double node(std::size_t j) const { return x0_ + static_cast<double>(j) * dx_; }

    // CDF at the right edge of cell j
    double cdf_at_cell(std::size_t j) const { return cdf_[j + 1]; }
    double cdf(double x) const;
    double mean() const;
    double variance() const;
    // linear interpolation of the tabulated CDF between cell edges
    double quantile(double u) const;

    // diagnostics filled in by build_increment_table
    double truncated_mass = 0.0;
    double clipped_negative_mass = 0.0;
    double max_imag = 0.0;

private:
    double dt_;
    double x0_;
    double dx_;
    std::vector<double> mass_;
    std::vector<double> cdf_;
    std::vector<std::uint32_t> guide_;
};

// Cumulants of X_dt from derivatives of the exponent at 0.
double increment_mean(const LevyModel& model, double dt);
double increment_variance(const LevyModel& model, double dt);

IncrementTable build_increment_table(const LevyModel& model, double dt, const IncrementGridSpec& spec = {});

// Same construction for any exponent Psi(theta), real theta, given the mean
// and variance of X_dt.
using ExponentFunction = std::function<cplx(double)>;
IncrementTable build_increment_table(const ExponentFunction& psi, double dt, double mean, double variance,
                                     const IncrementGridSpec& spec = {});

struct WalkSample {
    double X = 0.0;
    double max = 0.0;
    double min = 0.0;
};

// Step k of a path draws its uniform from counter (path, k / 2), component k % 2.
WalkSample simulate_walk(const IncrementTable& table, std::size_t n_grid_steps, const CounterRng& rng,
                         std::uint64_t path);

}  // namespace whmc
