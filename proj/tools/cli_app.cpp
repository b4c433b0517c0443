#include "cli_app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "whmc/baseline_mc.hpp"
#include "whmc/fourier_engine.hpp"
#include "whmc/levy_models.hpp"
#include "whmc/pricing.hpp"
#include "whmc/wh_factorization.hpp"
#include "whmc/whmc_engine.hpp"

namespace whmc::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

template <class T>
T read_number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) {
        throw UsageError("config: '" + key + "' must be a number");
    }
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
            throw UsageError("config: '" + key + "' must be a nonnegative integer");
        }
    }
    return v.get<T>();
}

std::string read_string(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) {
        throw UsageError("config: '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

template <class T>
std::vector<T> read_array(const nlohmann::json& v, const std::string& key) {
    if (!v.is_array()) {
        throw UsageError("config: '" + key + "' must be an array");
    }
    std::vector<T> out;
    for (const auto& e : v) {
        out.push_back(read_number<T>(e, key));
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (double s = lo; s <= hi + 1e-9; s += step) {
        out.push_back(std::round(s * 1e6) / 1e6);
    }
    return out;
}

std::vector<double> default_spots(const RunConfig& c) {
    if (c.b_lower > 0.0) {
        const double hi = c.b_upper > 0.0 ? c.b_upper : 2.0 * c.strike;
        std::vector<double> s = grid(c.b_lower + 0.25, hi - 0.25, 0.25);
        return s;
    }
    const double hi = c.b_upper > 0.0 ? c.b_upper : 2.0 * c.strike;
    std::vector<double> s = grid(0.5, hi - 0.5, 0.5);
    if (c.b_upper > 0.0) {
        s.push_back(c.b_upper * 0.99);
    }
    return s;
}

struct Context {
    RunConfig cfg;
    LevyModel model;
    BarrierSpec spec;
    PricingConfig pricing;
    std::vector<double> spots;
};

Context resolve(const RunConfig& in) {
    if (in.model.is_null()) {
        throw UsageError("no model: give --preset or a \"model\" entry in --config");
    }
    LevyModel model = model_from_json(in.model);
    if (in.calibrate) {
        model = calibrate_risk_neutral_drift(model, in.r);
    }
    Context ctx{in, model, {}, {}, {}};
    if (in.calibrate) {
        ctx.cfg.model = model_to_json(ctx.model);
        ctx.cfg.calibrate = false;
    }
    if (ctx.cfg.workers == 0) {
        ctx.cfg.workers = std::max(1u, std::thread::hardware_concurrency());
    }
    if (in.steps == 0 || in.paths == 0 || in.truncation == 0) {
        throw UsageError("steps, paths and truncation must be >= 1");
    }
    ctx.spec.strike = in.strike;
    ctx.spec.b_upper = in.b_upper > 0.0 ? in.b_upper : std::numeric_limits<double>::infinity();
    ctx.spec.b_lower = in.b_lower;
    ctx.spec.r = in.r;
    ctx.spec.t = in.t;
    ctx.spec.s = in.converge_spot;
    ctx.pricing.sim.t = in.t;
    ctx.pricing.sim.n_steps = in.steps;
    ctx.pricing.sim.n_paths = in.paths;
    ctx.pricing.sim.seed = in.seed;
    ctx.pricing.sim.K = in.truncation;
    ctx.pricing.sim.workers = ctx.cfg.workers;
    ctx.pricing.baseline_steps = in.baseline_steps;
    ctx.pricing.contour.K = in.truncation;
    ctx.spots = in.spots.empty() ? default_spots(in) : in.spots;
    ctx.cfg.spots = ctx.spots;
    return ctx;
}

using Artifacts = std::map<std::string, std::string>;

std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream os;
    write_price_curve_csv(os, curve);
    return os.str();
}

nlohmann::json run_factorize(const Context& ctx, Artifacts& art) {
    const double lambda = ctx.cfg.lambda > 0.0 ? ctx.cfg.lambda : static_cast<double>(ctx.cfg.steps) / ctx.cfg.t;
    const RootLadder ladder = locate_roots(ctx.model, lambda, ctx.cfg.truncation);
    CoefficientDiagnostics dsup, dinf;
    FactorizationPair pair;
    pair.lambda = lambda;
    pair.sup_law = factor_coefficients(ladder, ctx.model, Side::sup, &dsup);
    pair.inf_law = factor_coefficients(ladder, ctx.model, Side::inf, &dinf);
    std::vector<double> thetas;
    for (int i = 0; i <= 40; ++i) {
        thetas.push_back(-10.0 + 0.5 * i);
    }
    const double wh_error = wiener_hopf_identity_error(pair, ctx.model, thetas);
    const auto report = [](const FactorLaw& law) {
        const ValidationReport v = validate_law(law, default_validation_grid(law));
        return nlohmann::json{{"pass", v.pass},         {"warn", v.warn},
                              {"failure", v.failure},   {"worst_x", v.worst_x},
                              {"mass_error", v.mass_error}, {"max_cf_modulus", v.max_cf_modulus}};
    };
    const auto to_double = [](const std::vector<long double>& v) { return std::vector<double>(v.begin(), v.end()); };
    double max_residual = 0.0;
    for (const auto* r : {&ladder.plus_residuals, &ladder.minus_residuals}) {
        for (long double x : *r) {
            max_residual = std::max(max_residual, static_cast<double>(std::fabs(x)));
        }
    }
    nlohmann::json validation{{"sup", report(pair.sup_law)}, {"inf", report(pair.inf_law)}};
    nlohmann::json out{{"lambda", lambda},
                       {"K", ctx.cfg.truncation},
                       {"minus_roots", to_double(ladder.minus_roots)},
                       {"plus_roots", to_double(ladder.plus_roots)},
                       {"max_root_residual", max_residual},
                       {"sup_law", pair.sup_law},
                       {"inf_law", pair.inf_law},
                       {"sup_product_atom", dsup.product_atom},
                       {"wiener_hopf_identity_error", wh_error},
                       {"validation", validation}};
    art["factorization.json"] = out.dump(2) + "\n";
    const bool pass = validation["sup"]["pass"].get<bool>() && validation["inf"]["pass"].get<bool>();
    return {{"validation_pass", pass}, {"wiener_hopf_identity_error", wh_error}};
}

nlohmann::json run_density(const Context& ctx, Artifacts& art) {
    const auto& d = ctx.cfg.density;
    if (!(d.x_max > 0.0) || !(d.y_max > 0.0) || d.nx == 0 || d.ny == 0) {
        throw UsageError("density grid needs x_max, y_max > 0 and nx, ny >= 1");
    }
    const double dx = d.x_max / d.nx, dy = d.y_max / d.ny;
    JointDensityGrid g;
    for (std::size_t i = 0; i < d.nx; ++i) {
        g.x.push_back((i + 0.5) * dx);
    }
    for (std::size_t j = 0; j < d.ny; ++j) {
        g.y.push_back((j + 0.5) * dy);
    }
    nlohmann::json summary;
    const Engine engine = parse_engine(ctx.cfg.engine);
    if (engine == Engine::fourier) {
        g = joint_density(ctx.model, ctx.cfg.t, g.x, g.y, ctx.pricing.contour);
        summary["inversion"] = g.report;
        summary["contour"] = ctx.pricing.contour;
    } else {
        // histogram of (sup, sup - X) normalised to a density over the grid cells
        std::vector<double> counts(d.nx * d.ny, 0.0);
        std::size_t at_zero = 0;
        const CounterRng rng(ctx.cfg.seed);
        const auto add = [&](double sup, double x) {
            if (sup == 0.0) {
                ++at_zero;
            }
            const double y = sup - x;
            if (sup < d.x_max && y < d.y_max) {
                counts[static_cast<std::size_t>(sup / dx) * d.ny + static_cast<std::size_t>(y / dy)] += 1.0;
            }
        };
        if (engine == Engine::whmc) {
            FactorizationOptions opt;
            opt.K = ctx.cfg.truncation;
            const FactorizationPair laws = build_factorization(ctx.model, ctx.pricing.sim.lambda(), opt);
            for (std::uint64_t p = 0; p < ctx.cfg.paths; ++p) {
                const PairSample s = simulate_pair(laws, ctx.cfg.steps, rng, p);
                add(s.J, s.V);
            }
        } else {
            const std::size_t steps = ctx.cfg.baseline_steps > 0 ? ctx.cfg.baseline_steps : 2 * ctx.cfg.steps;
            const IncrementTable table = build_increment_table(ctx.model, ctx.cfg.t / steps);
            for (std::uint64_t p = 0; p < ctx.cfg.paths; ++p) {
                const WalkSample w = simulate_walk(table, steps, rng, p);
                add(w.max, w.X);
            }
        }
        g.values.resize(counts.size());
        for (std::size_t k = 0; k < counts.size(); ++k) {
            g.values[k] = counts[k] / (static_cast<double>(ctx.cfg.paths) * dx * dy);
        }
        g.min_value = 0.0;
        summary["fraction_sup_zero"] = static_cast<double>(at_zero) / static_cast<double>(ctx.cfg.paths);
    }
    std::ostringstream os;
    write_joint_csv(os, g);
    art["joint_density.csv"] = os.str();
    summary["min_value"] = g.min_value;
    return summary;
}

nlohmann::json run_sample(const Context& ctx, Artifacts& art) {
    FactorizationOptions opt;
    opt.K = ctx.cfg.truncation;
    const FactorizationPair laws = build_factorization(ctx.model, ctx.pricing.sim.lambda(), opt);
    const CounterRng rng(ctx.cfg.seed);
    std::vector<PathFunctionalSample> samples(ctx.cfg.paths);
    for (std::uint64_t p = 0; p < ctx.cfg.paths; ++p) {
        samples[p] = simulate_triple(laws, ctx.cfg.steps, rng, p);
    }
    std::ostringstream os;
    write_samples_csv(os, samples);
    art["samples.csv"] = os.str();
    return {{"paths", ctx.cfg.paths}};
}

nlohmann::json run_price(const Context& ctx, Artifacts& art) {
    const Engine engine = parse_engine(ctx.cfg.engine);
    if (ctx.spec.b_lower > 0.0 && engine == Engine::whmc) {
        const auto curve = double_no_touch_curve(ctx.model, ctx.spec, ctx.spots, ctx.pricing);
        std::ostringstream os;
        write_bounds_curve_csv(os, curve);
        art["dnt_bounds.csv"] = os.str();
        return {{"points", curve.size()}};
    }
    if (ctx.spec.b_lower > 0.0 && engine == Engine::fourier) {
        throw UsageError("the fourier engine prices up-and-out contracts only (b_lower must be 0)");
    }
    const auto curve = price_curve(ctx.model, ctx.spec, ctx.spots, engine, ctx.pricing);
    art["price_curve.csv"] = curve_csv(curve);
    return {{"points", curve.size()}};
}

nlohmann::json run_compare(const Context& ctx, Artifacts& art) {
    std::ostringstream os;
    os.precision(12);
    const auto baseline = price_curve(ctx.model, ctx.spec, ctx.spots, Engine::baseline, ctx.pricing);
    if (ctx.spec.b_lower > 0.0) {
        const auto bounds = double_no_touch_curve(ctx.model, ctx.spec, ctx.spots, ctx.pricing);
        os << "s,lower,lower_std_error,upper,upper_std_error,baseline,baseline_std_error\n";
        for (std::size_t i = 0; i < ctx.spots.size(); ++i) {
            os << ctx.spots[i] << ',' << bounds[i].bounds.lower.value << ',' << bounds[i].bounds.lower.std_error << ','
               << bounds[i].bounds.upper.value << ',' << bounds[i].bounds.upper.std_error << ','
               << baseline[i].estimate.value << ',' << baseline[i].estimate.std_error << '\n';
        }
    } else {
        const auto fourier = price_curve(ctx.model, ctx.spec, ctx.spots, Engine::fourier, ctx.pricing);
        const auto whmc = price_curve(ctx.model, ctx.spec, ctx.spots, Engine::whmc, ctx.pricing);
        os << "s,fourier,whmc,whmc_std_error,baseline,baseline_std_error\n";
        for (std::size_t i = 0; i < ctx.spots.size(); ++i) {
            os << ctx.spots[i] << ',' << fourier[i].estimate.value << ',' << whmc[i].estimate.value << ','
               << whmc[i].estimate.std_error << ',' << baseline[i].estimate.value << ','
               << baseline[i].estimate.std_error << '\n';
        }
    }
    art["compare.csv"] = os.str();
    return {{"points", ctx.spots.size()}};
}

nlohmann::json run_converge(const Context& ctx, Artifacts& art) {
    if (ctx.spec.b_lower > 0.0) {
        throw UsageError("converge studies the up-and-out payoff (b_lower must be 0)");
    }
    require_calibrated(ctx.model, ctx.cfg.r);
    const double s = ctx.cfg.converge_spot;
    const double K = ctx.spec.strike, b = ctx.spec.b_upper;
    const double disc = std::exp(-ctx.cfg.r * ctx.cfg.t);
    const auto payoff = [&](const PairSample& p) {
        return s * std::exp(p.J) < b ? disc * std::max(s * std::exp(p.V) - K, 0.0) : 0.0;
    };
    const auto rows = convergence_study(ctx.model, payoff, ctx.cfg.t, ctx.cfg.n_list, ctx.pricing.sim);
    UpAndOutPayoff po;
    po.strike = K;
    po.barrier = b;
    po.r = ctx.cfg.r;
    const double reference = benchmark_up_and_out(ctx.model, po, {s}, ctx.cfg.t, ctx.pricing.contour).front();
    std::ostringstream os;
    os.precision(12);
    os << "n,value,std_error,reference,bias\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.value << ',' << r.std_error << ',' << reference << ',' << r.value - reference << '\n';
    }
    art["convergence.csv"] = os.str();
    return {{"reference", reference}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    }
    f << content;
    if (!f) {
        throw std::ios_base::failure("failed writing " + path.string());
    }
}

nlohmann::json error_json(const std::string& type, const std::string& message) {
    return {{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"command", c.command},
                       {"preset", c.preset},
                       {"model", c.model},
                       {"r", c.r},
                       {"calibrate", c.calibrate},
                       {"t", c.t},
                       {"steps", c.steps},
                       {"paths", c.paths},
                       {"seed", c.seed},
                       {"truncation", c.truncation},
                       {"workers", c.workers},
                       {"engine", c.engine},
                       {"strike", c.strike},
                       {"b_upper", c.b_upper},
                       {"b_lower", c.b_lower},
                       {"spots", c.spots},
                       {"baseline_steps", c.baseline_steps},
                       {"lambda", c.lambda},
                       {"density", {{"x_max", c.density.x_max},
                                    {"y_max", c.density.y_max},
                                    {"nx", c.density.nx},
                                    {"ny", c.density.ny}}},
                       {"n_list", c.n_list},
                       {"converge_spot", c.converge_spot},
                       {"out", c.out}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
    if (!j.is_object()) {
        throw UsageError("config: expected a JSON object");
    }
    for (const auto& [key, v] : j.items()) {
        if (key == "command") {
            c.command = read_string(v, key);
        } else if (key == "preset") {
            c.preset = read_string(v, key);
        } else if (key == "model") {
            if (!v.is_object()) {
                throw UsageError("config: 'model' must be an object");
            }
            c.model = v;
        } else if (key == "r") {
            c.r = read_number<double>(v, key);
        } else if (key == "calibrate") {
            if (!v.is_boolean()) {
                throw UsageError("config: 'calibrate' must be a boolean");
            }
            c.calibrate = v.get<bool>();
        } else if (key == "t") {
            c.t = read_number<double>(v, key);
        } else if (key == "steps") {
            c.steps = read_number<std::size_t>(v, key);
        } else if (key == "paths") {
            c.paths = read_number<std::size_t>(v, key);
        } else if (key == "seed") {
            c.seed = read_number<std::uint64_t>(v, key);
        } else if (key == "truncation") {
            c.truncation = read_number<std::size_t>(v, key);
        } else if (key == "workers") {
            c.workers = read_number<unsigned>(v, key);
        } else if (key == "engine") {
            c.engine = read_string(v, key);
        } else if (key == "strike") {
            c.strike = read_number<double>(v, key);
        } else if (key == "b_upper") {
            c.b_upper = read_number<double>(v, key);
        } else if (key == "b_lower") {
            c.b_lower = read_number<double>(v, key);
        } else if (key == "spots") {
            c.spots = read_array<double>(v, key);
        } else if (key == "baseline_steps") {
            c.baseline_steps = read_number<std::size_t>(v, key);
        } else if (key == "lambda") {
            c.lambda = read_number<double>(v, key);
        } else if (key == "density") {
            if (!v.is_object()) {
                throw UsageError("config: 'density' must be an object");
            }
            for (const auto& [dk, dv] : v.items()) {
                if (dk == "x_max") {
                    c.density.x_max = read_number<double>(dv, "density.x_max");
                } else if (dk == "y_max") {
                    c.density.y_max = read_number<double>(dv, "density.y_max");
                } else if (dk == "nx") {
                    c.density.nx = read_number<std::size_t>(dv, "density.nx");
                } else if (dk == "ny") {
                    c.density.ny = read_number<std::size_t>(dv, "density.ny");
                } else {
                    throw UsageError("config: unknown key 'density." + dk + "'");
                }
            }
        } else if (key == "n_list") {
            c.n_list = read_array<std::size_t>(v, key);
        } else if (key == "converge_spot") {
            c.converge_spot = read_number<double>(v, key);
        } else if (key == "out") {
            c.out = read_string(v, key);
        } else {
            throw UsageError("config: unknown key '" + key + "'");
        }
    }
    if (!c.command.empty() && std::find(commands().begin(), commands().end(), c.command) == commands().end()) {
        throw UsageError("config: unknown command '" + c.command + "'");
    }
    parse_engine(c.engine);
}

const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"factorize", "density", "sample", "price", "compare", "converge"};
    return c;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> p{"paper-set1", "paper-set2", "paper-dnt", "paper-set1-uo"};
    return p;
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    BetaFamilyParams p;
    p.c1 = p.c2 = 1.0;
    p.alpha1 = p.alpha2 = 1.0;
    p.beta1 = p.beta2 = 1.5;
    p.lambda1 = p.lambda2 = 1.5;
    if (name == "paper-set1" || name == "paper-set1-uo" || name == "paper-dnt") {
        p.sigma = 0.4;
    } else if (name == "paper-set2") {
        p.sigma = 0.0;
    } else {
        throw UsageError("unknown preset '" + name + "' (expected paper-set1, paper-set2, paper-dnt or paper-set1-uo)");
    }
    c.preset = name;
    c.model = {{"kind", "beta_family"}, {"params", p}};
    c.r = 0.05;
    c.calibrate = true;
    c.strike = 5.0;
    c.b_upper = 10.0;
    if (name == "paper-dnt") {
        c.b_lower = 3.0;
        c.steps = 200;
        c.baseline_steps = 400;
    }
    return c;
}

nlohmann::json run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const Context ctx = resolve(config);
    Artifacts art;
    nlohmann::json summary;
    const std::string& cmd = ctx.cfg.command;
    if (cmd == "factorize") {
        summary = run_factorize(ctx, art);
    } else if (cmd == "density") {
        summary = run_density(ctx, art);
    } else if (cmd == "sample") {
        summary = run_sample(ctx, art);
    } else if (cmd == "price") {
        summary = run_price(ctx, art);
    } else if (cmd == "compare") {
        summary = run_compare(ctx, art);
    } else if (cmd == "converge") {
        summary = run_converge(ctx, art);
    } else {
        throw UsageError("no command given");
    }
    const std::filesystem::path dir(ctx.cfg.out);
    std::filesystem::create_directories(dir);
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto& [name, content] : art) {
        write_file(dir / name, content);
        hashes[name] = hex64(fnv1a(content));
    }
    nlohmann::json meta{{"software", {{"name", "whmc"}, {"version", kVersion}}},
                        {"config", ctx.cfg},
                        {"command", cmd},
                        {"engine", ctx.cfg.engine},
                        {"seed", ctx.cfg.seed},
                        {"steps", ctx.cfg.steps},
                        {"paths", ctx.cfg.paths},
                        {"truncation", ctx.cfg.truncation},
                        {"model_hash", ctx.model.hash()},
                        {"artifacts", hashes},
                        {"summary", summary},
                        {"wall_seconds",
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    write_file(dir / "metadata.json", meta.dump(2) + "\n");
    return meta;
}

int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wiener-Hopf Monte-Carlo for beta-family and hypergeometric Levy processes", "whmc"};
    app.require_subcommand(0, 1);

    struct Flags {
        std::string config, preset, out, engine;
        std::uint64_t seed = 0;
        std::size_t paths = 0, steps = 0, truncation = 0;
        unsigned workers = 0;
        bool paper_scale = false;
    };
    Flags flags;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    std::vector<CLI::App*> subs;
    const std::vector<std::pair<std::string, std::string>> descr{
        {"factorize", "roots and factor laws at one rate, with validation"},
        {"density", "joint density of (sup X, sup X - X_t) on a grid"},
        {"sample", "WHMC samples of (V, J, K, J~, K~)"},
        {"price", "barrier option price curve"},
        {"compare", "price curves of all engines side by side"},
        {"converge", "WHMC bias against the Fourier benchmark as N grows"},
        {"run", "execute the command stored in --config (e.g. a metadata.json)"}};
    for (const auto& [name, text] : descr) {
        CLI::App* sub = app.add_subcommand(name, text);
        auto& o = opts[name];
        o["config"] = sub->add_option("--config", flags.config, "JSON run configuration or metadata file");
        o["preset"] = sub->add_option("--preset", flags.preset, "paper-set1 | paper-set2 | paper-dnt | paper-set1-uo");
        o["seed"] = sub->add_option("--seed", flags.seed, "random seed");
        o["paths"] = sub->add_option("--paths", flags.paths, "Monte-Carlo paths M");
        o["steps"] = sub->add_option("--steps", flags.steps, "time steps N");
        o["truncation"] = sub->add_option("--truncation", flags.truncation, "roots per side K");
        o["out"] = sub->add_option("--out", flags.out, "output directory");
        o["engine"] = sub->add_option("--engine", flags.engine, "whmc | baseline | fourier");
        o["workers"] = sub->add_option("--workers", flags.workers, "worker threads (default: logical cores)");
        o["paper_scale"] = sub->add_flag("--paper-scale", flags.paper_scale, "use 10^7 paths");
        subs.push_back(sub);
    }

    try {
        if (argc <= 1) {
            out << app.help();
            return 2;
        }
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_json("usage", e.what()).dump() << '\n';
        return 2;
    }

    CLI::App* chosen = nullptr;
    for (CLI::App* sub : subs) {
        if (sub->parsed()) {
            chosen = sub;
        }
    }
    if (!chosen) {
        out << app.help();
        return 2;
    }
    const std::string name = chosen->get_name();
    auto& o = opts[name];
    try {
        RunConfig cfg;
        if (o["preset"]->count() > 0) {
            cfg = preset(flags.preset);
        }
        if (o["config"]->count() > 0) {
            std::ifstream f(flags.config);
            if (!f) {
                throw UsageError("cannot read config file '" + flags.config + "'");
            }
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(f);
            } catch (const nlohmann::json::parse_error& e) {
                throw UsageError(std::string("config is not valid JSON: ") + e.what());
            }
            // a metadata record carries the run configuration under "config"
            if (j.is_object() && j.contains("config") && j.contains("artifacts")) {
                j = j.at("config");
            }
            from_json(j, cfg);
        }
        if (name != "run") {
            if (!cfg.command.empty() && cfg.command != name && o["config"]->count() > 0) {
                throw UsageError("config command '" + cfg.command + "' does not match subcommand '" + name + "'");
            }
            cfg.command = name;
        } else if (cfg.command.empty()) {
            throw UsageError("run: the config does not name a command");
        }
        if (o["seed"]->count() > 0) {
            cfg.seed = flags.seed;
        }
        if (o["paths"]->count() > 0) {
            cfg.paths = flags.paths;
        }
        if (flags.paper_scale) {
            cfg.paths = 10000000;
        }
        if (o["steps"]->count() > 0) {
            cfg.steps = flags.steps;
        }
        if (o["truncation"]->count() > 0) {
            cfg.truncation = flags.truncation;
        }
        if (o["out"]->count() > 0) {
            cfg.out = flags.out;
        }
        if (o["engine"]->count() > 0) {
            parse_engine(flags.engine);
            cfg.engine = flags.engine;
        }
        if (o["workers"]->count() > 0) {
            cfg.workers = flags.workers;
        }
        const nlohmann::json meta = run(cfg);
        out << nlohmann::json{{"artifacts", meta.at("artifacts")}, {"out", cfg.out}, {"summary", meta.at("summary")}}
                   .dump()
            << '\n';
        if (name == "factorize" || cfg.command == "factorize") {
            if (!meta.at("summary").at("validation_pass").get<bool>()) {
                err << error_json("numerical", "factor law validation failed").dump() << '\n';
                return 1;
            }
        }
        return 0;
    } catch (const UsageError& e) {
        err << error_json("usage", e.what()).dump() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        // parameter validation, uncalibrated models and malformed specs
        err << error_json("usage", e.what()).dump() << '\n';
        return 2;
    } catch (const std::ios_base::failure& e) {
        err << error_json("io", e.what()).dump() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << error_json("io", e.what()).dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << error_json("numerical", e.what()).dump() << '\n';
        return 1;
    }
}

}  // namespace whmc::cli
