#include "whmc/whmc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

namespace whmc {

void to_json(nlohmann::json& j, const Estimate& e) {
    j = nlohmann::json{{"value", e.value},     {"std_error", e.std_error}, {"n_paths", e.n_paths},
                       {"n_steps", e.n_steps}, {"seed", e.seed},           {"rejected", e.rejected}};
}

PairSample simulate_pair(const FactorizationPair& laws, std::size_t n, const CounterRng& rng, std::uint64_t path) {
    double v = 0.0;
    double j = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        const auto u = rng.uniforms(path, static_cast<std::uint32_t>(step), stream_layout::factors);
        const double s = laws.sup_law.sample_upper(u[0]);
        const double i = -laws.inf_law.sample_upper(u[1]);
        j = std::max(j, v + s);
        v = v + s + i;
    }
    return {v, j};
}

PathFunctionalSample simulate_triple(const FactorizationPair& laws, std::size_t n, const CounterRng& rng,
                                     std::uint64_t path) {
    PathFunctionalSample p;
    for (std::size_t step = 0; step < n; ++step) {
        const auto u = rng.uniforms(path, static_cast<std::uint32_t>(step), stream_layout::factors);
        const double s = laws.sup_law.sample_upper(u[0]);
        const double i = -laws.inf_law.sample_upper(u[1]);
        const double prev = p.V;
        p.V = prev + s + i;
        p.J = std::max(p.J, prev + s);
        p.K = std::min(p.K, p.V);
        p.Jt = std::max(p.Jt, p.V);
        p.Kt = std::min(p.Kt, prev + i);
    }
    return p;
}

JumpDistribution JumpDistribution::normal(double mean, double sd) {
    JumpDistribution d;
    d.kind = JumpKind::normal;
    d.mean = mean;
    d.sd = sd;
    d.validate();
    return d;
}

JumpDistribution JumpDistribution::two_sided_exponential(double p_up, double eta_up, double eta_down) {
    JumpDistribution d;
    d.kind = JumpKind::two_sided_exponential;
    d.p_up = p_up;
    d.eta_up = eta_up;
    d.eta_down = eta_down;
    d.validate();
    return d;
}

JumpDistribution JumpDistribution::empirical(std::vector<double> values) {
    JumpDistribution d;
    d.kind = JumpKind::empirical;
    d.values = std::move(values);
    d.validate();
    return d;
}

void JumpDistribution::validate() const {
    switch (kind) {
        case JumpKind::none: return;
        case JumpKind::normal:
            if (!(sd >= 0.0) || !std::isfinite(mean)) {
                throw std::invalid_argument("normal jumps need a finite mean and sd >= 0");
            }
            return;
        case JumpKind::two_sided_exponential:
            if (!(p_up >= 0.0 && p_up <= 1.0) || !(eta_up > 0.0) || !(eta_down > 0.0)) {
                throw std::invalid_argument("two-sided exponential jumps need p_up in [0,1] and positive rates");
            }
            return;
        case JumpKind::empirical:
            if (values.empty()) {
                throw std::invalid_argument("empirical jump table is empty");
            }
            return;
    }
}

double JumpDistribution::sample(double u1, double u2) const {
    switch (kind) {
        case JumpKind::none: return 0.0;
        case JumpKind::normal:
            return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        case JumpKind::two_sided_exponential:
            return u1 < p_up ? -std::log(u2) / eta_up : std::log(u2) / eta_down;
        case JumpKind::empirical: {
            const auto idx = std::min(values.size() - 1, static_cast<std::size_t>(u1 * values.size()));
            return values[idx];
        }
    }
    return 0.0;
}

double JumpDistribution::expectation() const {
    switch (kind) {
        case JumpKind::none: return 0.0;
        case JumpKind::normal: return mean;
        case JumpKind::two_sided_exponential: return p_up / eta_up - (1.0 - p_up) / eta_down;
        case JumpKind::empirical: {
            double s = 0.0;
            for (double v : values) {
                s += v;
            }
            return s / values.size();
        }
    }
    return 0.0;
}

AugmentedSample simulate_jump_augmented(const FactorizationPair& laws, const JumpAugmentation& aug, std::size_t n,
                                        double lambda, const CounterRng& rng, std::uint64_t path) {
    if (!(aug.gamma >= 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("jump augmentation needs gamma >= 0 and lambda > 0");
    }
    const double p_mark = lambda / (lambda + aug.gamma);
    AugmentedSample out;
    std::size_t marks = 0;
    std::uint32_t step = 0;
    while (marks < n) {
        const auto u = rng.uniforms(path, step, stream_layout::factors);
        const auto b = rng.uniforms(path, step, stream_layout::mark_and_jump);
        const double s = laws.sup_law.sample_upper(u[0]);
        const double i = -laws.inf_law.sample_upper(u[1]);
        const bool marked = b[0] < p_mark;
        double xi = 0.0;
        if (!marked) {
            const auto e = rng.uniforms(path, step, stream_layout::jump_extra);
            xi = aug.jumps.sample(b[1], e[0]);
        }
        const double prev = out.V;
        out.V = prev + s + i + xi;
        out.J = std::max(out.V, std::max(out.J, prev + s));
        marks += marked ? 1 : 0;
        ++step;
        if (step == 0) {
            throw SimulationError("jump-augmented recursion exceeded the step counter range");
        }
    }
    out.steps = step;
    return out;
}

double sample_gamma_time(std::size_t n, double lambda, const CounterRng& rng, std::uint64_t path) {
    const CounterRng side(rng.seed() ^ 0x9E3779B97F4A7C15ULL);
    double total = 0.0;
    for (std::size_t k = 0; k < n; k += 2) {
        const auto u = side.uniforms(path, static_cast<std::uint32_t>(k / 2), 0);
        total -= std::log(u[0]);
        if (k + 1 < n) {
            total -= std::log(u[1]);
        }
    }
    return total / lambda;
}

namespace {

struct Moments {
    std::size_t count = 0;
    std::size_t rejected = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        if (!std::isfinite(x)) {
            ++rejected;
            return;
        }
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        rejected += o.rejected;
        if (o.count == 0) {
            return;
        }
        if (count == 0) {
            const std::size_t r = rejected;
            *this = o;
            rejected = r;
            return;
        }
        const double n1 = static_cast<double>(count);
        const double n2 = static_cast<double>(o.count);
        const double d = o.mean - mean;
        mean += d * n2 / (n1 + n2);
        m2 += o.m2 + d * d * n1 * n2 / (n1 + n2);
        count += o.count;
    }
};

}  // namespace

std::vector<Estimate> estimate_functionals(std::size_t n_outputs,
                                           const std::function<void(std::uint64_t, double*)>& eval,
                                           const SimConfig& config) {
    if (config.n_paths == 0 || n_outputs == 0) {
        throw std::invalid_argument("estimate: need at least one path and one output");
    }
    const std::size_t chunk = std::max<std::size_t>(1, config.chunk);
    const std::size_t n_chunks = (config.n_paths + chunk - 1) / chunk;
    std::vector<std::vector<Moments>> partial(n_chunks, std::vector<Moments>(n_outputs));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    const auto work = [&]() {
        std::vector<double> out(n_outputs);
        try {
            for (std::size_t c = next.fetch_add(1); c < n_chunks && !failed; c = next.fetch_add(1)) {
                const std::size_t begin = c * chunk;
                const std::size_t end = std::min(config.n_paths, begin + chunk);
                auto& acc = partial[c];
                for (std::size_t path = begin; path < end; ++path) {
                    eval(path, out.data());
                    for (std::size_t k = 0; k < n_outputs; ++k) {
                        acc[k].add(out[k]);
                    }
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) {
                failure = std::current_exception();
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(n_chunks)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::vector<Estimate> result(n_outputs);
    for (std::size_t k = 0; k < n_outputs; ++k) {
        Moments total;
        for (std::size_t c = 0; c < n_chunks; ++c) {
            total.merge(partial[c][k]);
        }
        if (static_cast<double>(total.rejected) > 1e-3 * static_cast<double>(config.n_paths)) {
            throw SimulationError("estimate: " + std::to_string(total.rejected) + " of " +
                                  std::to_string(config.n_paths) + " payoff values were not finite");
        }
        Estimate& e = result[k];
        e.value = total.mean;
        e.n_paths = total.count;
        e.n_steps = config.n_steps;
        e.seed = config.seed;
        e.rejected = total.rejected;
        if (total.count > 1) {
            const double var = total.m2 / static_cast<double>(total.count - 1);
            e.std_error = std::sqrt(var / static_cast<double>(total.count));
        }
    }
    return result;
}

std::vector<ConvergenceRow> convergence_study(const LevyModel& model, const PairPayoff& payoff, double t,
                                              const std::vector<std::size_t>& n_list, const SimConfig& base) {
    std::vector<ConvergenceRow> rows;
    const CounterRng rng(base.seed);
    for (std::size_t n : n_list) {
        SimConfig cfg = base;
        cfg.t = t;
        cfg.n_steps = n;
        FactorizationOptions opt;
        opt.K = base.K;
        const FactorizationPair laws = build_factorization(model, cfg.lambda(), opt);
        const auto est = estimate_functionals(
            1, [&](std::uint64_t path, double* out) { out[0] = payoff(simulate_pair(laws, n, rng, path)); }, cfg);
        rows.push_back({n, est[0].value, est[0].std_error});
    }
    return rows;
}

void write_samples_csv(std::ostream& out, const std::vector<PathFunctionalSample>& samples) {
    out << "V,J,K,Jt,Kt\n";
    out.precision(17);
    for (const auto& s : samples) {
        out << s.V << ',' << s.J << ',' << s.K << ',' << s.Jt << ',' << s.Kt << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    out << "n,value,std_error\n";
    out.precision(17);
    for (const auto& r : rows) {
        out << r.n << ',' << r.value << ',' << r.std_error << '\n';
    }
}

}  // namespace whmc
