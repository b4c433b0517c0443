#include "whmc/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace whmc {

void BarrierSpec::validate() const {
    if (!(s > 0.0) || !(strike > 0.0) || !(t > 0.0) || !(r >= 0.0)) {
        throw std::invalid_argument("barrier spec: s, strike and t must be > 0 and r >= 0");
    }
    if (!(b_lower >= 0.0) || !(b_upper > b_lower)) {
        throw std::invalid_argument("barrier spec: need 0 <= b_lower < b_upper");
    }
}

void to_json(nlohmann::json& j, const BarrierSpec& b) {
    j = nlohmann::json{{"s", b.s}, {"strike", b.strike}, {"b_lower", b.b_lower}, {"r", b.r}, {"t", b.t}};
    // JSON has no infinity; a missing upper barrier means none
    j["b_upper"] = std::isinf(b.b_upper) ? nlohmann::json(nullptr) : nlohmann::json(b.b_upper);
}

void from_json(const nlohmann::json& j, BarrierSpec& b) {
    BarrierSpec d;
    b.s = j.value("s", d.s);
    b.strike = j.value("strike", d.strike);
    b.b_lower = j.value("b_lower", d.b_lower);
    b.r = j.value("r", d.r);
    b.t = j.value("t", d.t);
    b.b_upper = (j.contains("b_upper") && !j.at("b_upper").is_null()) ? j.at("b_upper").get<double>() : d.b_upper;
}

Engine parse_engine(const std::string& name) {
    if (name == "whmc") {
        return Engine::whmc;
    }
    if (name == "baseline") {
        return Engine::baseline;
    }
    if (name == "fourier") {
        return Engine::fourier;
    }
    throw std::invalid_argument("unknown engine '" + name + "' (expected whmc, baseline or fourier)");
}

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::whmc:
            return "whmc";
        case Engine::baseline:
            return "baseline";
        case Engine::fourier:
            return "fourier";
    }
    return "unknown";
}

void require_calibrated(const LevyModel& model, double r, double tol) {
    const cplx p = model.psi(cplx(0.0, -1.0));
    if (std::abs(p + r) > tol) {
        throw UncalibratedModelError("model is not risk-neutral for r = " + std::to_string(r) + ": Psi(-i) = " +
                                     std::to_string(p.real()));
    }
}

namespace {

double up_and_out_payoff(double s, double strike, double b, double x, double sup) {
    return s * std::exp(sup) < b ? std::max(s * std::exp(x) - strike, 0.0) : 0.0;
}

void check_spots(const BarrierSpec& spec, const std::vector<double>& s_values) {
    for (double s : s_values) {
        BarrierSpec q = spec;
        q.s = s;
        q.validate();
    }
}

SimConfig whmc_config(const BarrierSpec& spec, const PricingConfig& config) {
    SimConfig sim = config.sim;
    sim.t = spec.t;
    return sim;
}

FactorizationPair whmc_laws(const LevyModel& model, const SimConfig& sim) {
    FactorizationOptions opt;
    opt.K = sim.K;
    return build_factorization(model, sim.lambda(), opt);
}

std::vector<Estimate> discounted(std::vector<Estimate> est, double r, double t) {
    const double d = std::exp(-r * t);
    for (auto& e : est) {
        e.value *= d;
        e.std_error *= d;
    }
    return est;
}

}  // namespace

std::vector<CurvePoint> price_curve(const LevyModel& model, const BarrierSpec& spec_template,
                                    const std::vector<double>& s_values, Engine engine, const PricingConfig& config) {
    check_spots(spec_template, s_values);
    require_calibrated(model, spec_template.r);
    const double K = spec_template.strike;
    const double b = spec_template.b_upper;
    const double lo = spec_template.b_lower;
    if (lo > 0.0 && engine != Engine::baseline) {
        throw std::invalid_argument("price curve: a lower barrier needs the baseline engine; use double_no_touch_curve "
                                    "for WHMC bounds");
    }
    const std::size_t n_s = s_values.size();
    std::vector<Estimate> est;
    if (engine == Engine::whmc) {
        const SimConfig sim = whmc_config(spec_template, config);
        const FactorizationPair laws = whmc_laws(model, sim);
        const CounterRng rng(sim.seed);
        est = estimate_functionals(
            n_s,
            [&](std::uint64_t path, double* out) {
                const PairSample p = simulate_pair(laws, sim.n_steps, rng, path);
                for (std::size_t i = 0; i < n_s; ++i) {
                    out[i] = up_and_out_payoff(s_values[i], K, b, p.V, p.J);
                }
            },
            sim);
    } else if (engine == Engine::baseline) {
        SimConfig sim = whmc_config(spec_template, config);
        const std::size_t steps = config.baseline_steps > 0 ? config.baseline_steps : 2 * sim.n_steps;
        const IncrementTable table = build_increment_table(model, spec_template.t / steps, config.grid);
        const CounterRng rng(sim.seed);
        sim.n_steps = steps;
        est = estimate_functionals(
            n_s,
            [&](std::uint64_t path, double* out) {
                const WalkSample w = simulate_walk(table, steps, rng, path);
                for (std::size_t i = 0; i < n_s; ++i) {
                    const bool alive = s_values[i] * std::exp(w.min) > lo;
                    out[i] = alive ? up_and_out_payoff(s_values[i], K, b, w.X, w.max) : 0.0;
                }
            },
            sim);
    } else {
        UpAndOutPayoff payoff;
        payoff.strike = K;
        payoff.barrier = b;
        payoff.r = spec_template.r;
        const std::vector<double> v = benchmark_up_and_out(model, payoff, s_values, spec_template.t, config.contour);
        std::vector<CurvePoint> out(n_s);
        for (std::size_t i = 0; i < n_s; ++i) {
            out[i].s = s_values[i];
            out[i].estimate.value = v[i];
        }
        return out;
    }
    est = discounted(std::move(est), spec_template.r, spec_template.t);
    std::vector<CurvePoint> out(n_s);
    for (std::size_t i = 0; i < n_s; ++i) {
        out[i] = {s_values[i], est[i]};
    }
    return out;
}

Estimate price_up_and_out(const LevyModel& model, const BarrierSpec& spec, Engine engine,
                          const PricingConfig& config) {
    return price_curve(model, spec, {spec.s}, engine, config).front().estimate;
}

std::vector<BoundsCurvePoint> double_no_touch_curve(const LevyModel& model, const BarrierSpec& spec_template,
                                                    const std::vector<double>& s_values, const PricingConfig& config) {
    check_spots(spec_template, s_values);
    for (double s : s_values) {
        if (!(spec_template.b_lower < s && s < spec_template.b_upper)) {
            throw std::invalid_argument("double no-touch: spot must lie strictly between the barriers");
        }
    }
    require_calibrated(model, spec_template.r);
    const double K = spec_template.strike;
    const double hi = spec_template.b_upper;
    const double lo = spec_template.b_lower;
    const std::size_t n_s = s_values.size();
    const SimConfig sim = whmc_config(spec_template, config);
    const FactorizationPair laws = whmc_laws(model, sim);
    const CounterRng rng(sim.seed);
    // outputs 2i: lower bound, 2i + 1: upper bound
    const auto est = discounted(estimate_functionals(
                                    2 * n_s,
                                    [&](std::uint64_t path, double* out) {
                                        const PathFunctionalSample p = simulate_triple(laws, sim.n_steps, rng, path);
                                        for (std::size_t i = 0; i < n_s; ++i) {
                                            const double s = s_values[i];
                                            const double g = std::max(s * std::exp(p.V) - K, 0.0);
                                            const double uo = s * std::exp(p.J) < hi ? g : 0.0;
                                            const bool low_t = s * std::exp(p.Jt) < hi && s * std::exp(p.Kt) < lo;
                                            const bool up_t = s * std::exp(p.J) < hi && s * std::exp(p.K) < lo;
                                            out[2 * i] = uo - (low_t ? g : 0.0);
                                            out[2 * i + 1] = uo - (up_t ? g : 0.0);
                                        }
                                    },
                                    sim),
                                spec_template.r, spec_template.t);
    std::vector<BoundsCurvePoint> out(n_s);
    for (std::size_t i = 0; i < n_s; ++i) {
        out[i] = {s_values[i], {est[2 * i], est[2 * i + 1]}};
    }
    return out;
}

BoundsEstimate price_double_no_touch_bounds(const LevyModel& model, const BarrierSpec& spec,
                                            const PricingConfig& config) {
    return double_no_touch_curve(model, spec, {spec.s}, config).front().bounds;
}

void write_price_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
    os << "s,value,std_error\n";
    os.precision(12);
    for (const auto& p : curve) {
        os << p.s << ',' << p.estimate.value << ',' << p.estimate.std_error << '\n';
    }
}

void write_bounds_curve_csv(std::ostream& os, const std::vector<BoundsCurvePoint>& curve) {
    os << "s,lower,lower_std_error,upper,upper_std_error\n";
    os.precision(12);
    for (const auto& p : curve) {
        os << p.s << ',' << p.bounds.lower.value << ',' << p.bounds.lower.std_error << ',' << p.bounds.upper.value
           << ',' << p.bounds.upper.std_error << '\n';
    }
}

}  // namespace whmc
