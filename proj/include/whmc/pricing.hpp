#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "whmc/baseline_mc.hpp"
#include "whmc/fourier_engine.hpp"
#include "whmc/levy_models.hpp"
#include "whmc/whmc_engine.hpp"

namespace whmc {

class UncalibratedModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Call on s e^{X_t} knocked out when the running maximum reaches b_upper or,
// for double no-touch contracts, the running minimum reaches b_lower.
struct BarrierSpec {
    double s = 5.0;
    double strike = 5.0;
    double b_upper = std::numeric_limits<double>::infinity();
    double b_lower = 0.0;
    double r = 0.05;
    double t = 1.0;

    void validate() const;
};

void to_json(nlohmann::json& j, const BarrierSpec& b);
void from_json(const nlohmann::json& j, BarrierSpec& b);

enum class Engine { whmc, baseline, fourier };

Engine parse_engine(const std::string& name);
std::string engine_name(Engine e);

struct PricingConfig {
    // WHMC settings; n_steps is the number of exponential epochs N
    SimConfig sim;
    // random-walk steps of the baseline; 0 selects 2 N
    std::size_t baseline_steps = 0;
    IncrementGridSpec grid;
    ContourSpec contour;
};

// Refuses models with |Psi(-i) + r| above tol, for which e^{X_t - r t} is not a martingale.
void require_calibrated(const LevyModel& model, double r, double tol = 1e-8);

Estimate price_up_and_out(const LevyModel& model, const BarrierSpec& spec, Engine engine,
                          const PricingConfig& config);

struct BoundsEstimate {
    Estimate lower;
    Estimate upper;
};

// Double no-touch call bounds from (V, J~, K~) and (V, J, K) on shared paths.
BoundsEstimate price_double_no_touch_bounds(const LevyModel& model, const BarrierSpec& spec,
                                            const PricingConfig& config);

struct CurvePoint {
    double s = 0.0;
    Estimate estimate;
};

// One estimate per spot; Monte-Carlo engines reuse the same paths for every spot.
// A positive b_lower is honoured by the baseline engine only (double no-touch
// on the discrete walk).
std::vector<CurvePoint> price_curve(const LevyModel& model, const BarrierSpec& spec_template,
                                    const std::vector<double>& s_values, Engine engine, const PricingConfig& config);

struct BoundsCurvePoint {
    double s = 0.0;
    BoundsEstimate bounds;
};

std::vector<BoundsCurvePoint> double_no_touch_curve(const LevyModel& model, const BarrierSpec& spec_template,
                                                    const std::vector<double>& s_values, const PricingConfig& config);

void write_price_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);
void write_bounds_curve_csv(std::ostream& os, const std::vector<BoundsCurvePoint>& curve);

}  // namespace whmc
