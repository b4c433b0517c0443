#include "whmc/baseline_mc.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>

namespace whmc {

namespace {

constexpr double kSmoothingCells = 2.0;

struct FftwDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

// Cell-averaged density of X_dt on x0 + j dx, j < n, by a single FFT of the
// characteristic function multiplied by the transform of the cell indicator.
// A Gaussian filter of width kSmoothingCells cells removes truncation ripple;
// its kernel is positive, keeps mass and mean, adds variance (2 dx)^2 and
// lets atoms of compound Poisson increments be tabulated.
std::vector<std::complex<double>> invert_cf(const ExponentFunction& psi, double dt, double x0, double dx,
                                            std::size_t n) {
    std::unique_ptr<fftw_complex[], FftwDeleter> buf(fftw_alloc_complex(n));
    const double dtheta = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
    const double width = kSmoothingCells * dx;
    const std::size_t mid = n / 2;
    buf[mid][0] = 1.0;
    buf[mid][1] = 0.0;
    buf[0][0] = 0.0;
    buf[0][1] = 0.0;
    std::size_t underflow_run = 0;
    for (std::size_t k = 1; k < mid; ++k) {
        std::complex<double> v(0.0, 0.0);
        if (underflow_run < 64) {
            const double th = static_cast<double>(k) * dtheta;
            const std::complex<double> e = -dt * psi(th);
            underflow_run = e.real() < -745.0 ? underflow_run + 1 : 0;
            const double h = 0.5 * th * dx;
            const double filter = std::exp(-0.5 * th * th * width * width);
            v = std::exp(e - std::complex<double>(0.0, th * x0)) * (std::sin(h) / h * filter);
        }
        // X_dt is real, so its characteristic function is Hermitian
        buf[mid + k][0] = v.real();
        buf[mid + k][1] = v.imag();
        buf[mid - k][0] = v.real();
        buf[mid - k][1] = -v.imag();
    }
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<std::complex<double>> out(n);
    const double scale = dtheta / (2.0 * std::numbers::pi) * dx;
    for (std::size_t j = 0; j < n; ++j) {
        // shift of theta by n/2 grid steps contributes exp(i pi j)
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        out[j] = sign * scale * std::complex<double>(buf[j][0], buf[j][1]);
    }
    return out;
}

}  // namespace

void to_json(nlohmann::json& j, const IncrementGridSpec& g) {
    j = nlohmann::json{{"points", g.points},
                       {"sd_span", g.sd_span},
                       {"tail_tolerance", g.tail_tolerance},
                       {"negative_tolerance", g.negative_tolerance},
                       {"max_points", g.max_points}};
}

IncrementTable::IncrementTable(double dt, double x0, double dx, std::vector<double> cell_mass)
    : dt_(dt), x0_(x0), dx_(dx), mass_(std::move(cell_mass)) {
    if (mass_.size() < 2 || !(dx > 0.0)) {
        throw std::invalid_argument("increment table needs at least two cells and dx > 0");
    }
    cdf_.assign(mass_.size() + 1, 0.0);
    for (std::size_t j = 0; j < mass_.size(); ++j) {
        if (mass_[j] < 0.0) {
            throw std::invalid_argument("increment table cell mass is negative");
        }
        cdf_[j + 1] = cdf_[j] + mass_[j];
    }
    const double total = cdf_.back();
    for (auto& c : cdf_) {
        c /= total;
    }
    for (auto& m : mass_) {
        m /= total;
    }
    cdf_.back() = 1.0;
    guide_.resize(mass_.size() + 1);
    std::size_t j = 0;
    const double g = static_cast<double>(guide_.size() - 1);
    for (std::size_t i = 0; i < guide_.size(); ++i) {
        const double u = static_cast<double>(i) / g;
        while (j + 1 < mass_.size() && cdf_[j + 1] <= u) {
            ++j;
        }
        guide_[i] = static_cast<std::uint32_t>(j);
    }
}

double IncrementTable::cdf(double x) const {
    const double s = (x - (x0_ - 0.5 * dx_)) / dx_;
    if (s <= 0.0) {
        return 0.0;
    }
    if (s >= static_cast<double>(mass_.size())) {
        return 1.0;
    }
    const auto j = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(j);
    return cdf_[j] + w * (cdf_[j + 1] - cdf_[j]);
}

double IncrementTable::mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < mass_.size(); ++j) {
        m += mass_[j] * node(j);
    }
    return m;
}

double IncrementTable::variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t j = 0; j < mass_.size(); ++j) {
        const double d = node(j) - m;
        v += mass_[j] * d * d;
    }
    // cells are uniform on their width under linear CDF interpolation
    return v + dx_ * dx_ / 12.0;
}

double IncrementTable::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const double g = static_cast<double>(guide_.size() - 1);
    std::size_t j = guide_[static_cast<std::size_t>(u * g)];
    while (j + 1 < mass_.size() && cdf_[j + 1] <= u) {
        ++j;
    }
    const double lo = cdf_[j];
    const double hi = cdf_[j + 1];
    const double w = hi > lo ? (u - lo) / (hi - lo) : 0.5;
    return x0_ + (static_cast<double>(j) - 0.5 + w) * dx_;
}

double increment_mean(const LevyModel& model, double dt) {
    return -static_cast<double>(model.dpsi(cplx_ext(0.0L, 0.0L)).imag()) * dt;
}

double increment_variance(const LevyModel& model, double dt) {
    const long double h = 1e-5L;
    const cplx_ext d = model.dpsi(cplx_ext(h, 0.0L)) - model.dpsi(cplx_ext(-h, 0.0L));
    return static_cast<double>(d.real() / (2.0L * h)) * dt;
}

IncrementTable build_increment_table(const LevyModel& model, double dt, const IncrementGridSpec& spec) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("increment table needs dt > 0");
    }
    return build_increment_table([&model](double th) { return model.psi(cplx(th, 0.0)); }, dt,
                                 increment_mean(model, dt), increment_variance(model, dt), spec);
}

IncrementTable build_increment_table(const ExponentFunction& psi, double dt, double mean, double variance,
                                     const IncrementGridSpec& spec) {
    if (!(dt > 0.0) || !(variance > 0.0)) {
        throw std::invalid_argument("increment table needs dt > 0 and a positive variance");
    }
    const double sd = std::sqrt(variance);
    std::size_t n = spec.points;
    double half = spec.sd_span * sd;
    double worst_negative = 0.0;
    while (true) {
        const double dx = 2.0 * half / static_cast<double>(n);
        const double x0 = mean - half;
        const auto values = invert_cf(psi, dt, x0, dx, n);
        const std::size_t edge = n / 20;
        double outer_mass = 0.0;
        for (std::size_t j = 0; j < edge; ++j) {
            outer_mass += std::fabs(values[j].real()) + std::fabs(values[n - 1 - j].real());
        }
        if (outer_mass > spec.tail_tolerance) {
            if (2 * n > spec.max_points) {
                throw GridRefinementError("increment table: tail mass " + std::to_string(outer_mass) +
                                          " outside tolerance at the largest grid");
            }
            half *= 2.0;
            n *= 2;
            continue;
        }
        worst_negative = 0.0;
        double max_imag = 0.0;
        for (const auto& v : values) {
            worst_negative = std::min(worst_negative, v.real());
            max_imag = std::max(max_imag, std::fabs(v.imag()));
        }
        if (worst_negative < -spec.negative_tolerance) {
            if (2 * n > spec.max_points) {
                throw GridRefinementError("increment table: negative cell probability " +
                                          std::to_string(worst_negative) + " persists at the finest grid");
            }
            n *= 2;
            continue;
        }
        std::vector<double> mass(n);
        double clipped = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (values[j].real() < 0.0) {
                clipped -= values[j].real();
            }
            mass[j] = std::max(values[j].real(), 0.0);
        }
        IncrementTable table(dt, x0, dx, std::move(mass));
        table.truncated_mass = outer_mass;
        table.clipped_negative_mass = clipped;
        table.max_imag = max_imag;
        return table;
    }
}

WalkSample simulate_walk(const IncrementTable& table, std::size_t n_grid_steps, const CounterRng& rng,
                         std::uint64_t path) {
    WalkSample w;
    std::array<double, 2> u{};
    for (std::size_t k = 0; k < n_grid_steps; ++k) {
        if (k % 2 == 0) {
            u = rng.uniforms(path, static_cast<std::uint32_t>(k / 2), 0);
        }
        w.X += table.quantile(u[k % 2]);
        w.max = std::max(w.max, w.X);
        w.min = std::min(w.min, w.X);
    }
    return w;
}

}  // namespace whmc
