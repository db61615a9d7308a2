#include "nessim/pde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <memory>

namespace nessim {

namespace {

double temperature_cap(const ModelConfig& model) {
    return std::max({model.reservoirs.t_max(), model.initial_temperature,
                     model.reservoirs.t_inf()});
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// clip tiny negative values; anything beyond -1e-10 is an instability
void enforce_positivity(std::span<double> values, double weight, double& clipped,
                        const char* where) {
    for (double& g : values) {
        if (g < 0.0) {
            if (g < -1e-10)
                throw SolverError(std::string(where) +
                                  ": negative density beyond tolerance, unstable step");
            clipped += -g * weight;
            g = 0.0;
        }
    }
}

// normalized discrete Maxwellian on the grid nodes
std::vector<double> discrete_maxwellian(double v_max, int n, double temperature) {
    std::vector<double> m(static_cast<std::size_t>(n));
    const double dv = 2.0 * v_max / (n - 1);
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = -v_max + i * dv;
        m[i] = maxwellian_density(v, temperature);
        mass += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * m[i];
    }
    mass *= dv;
    for (double& x : m) x /= mass;
    return m;
}

}  // namespace

double SolverConfig::resolved_v_max(const ModelConfig& model) const {
    return v_max > 0.0 ? v_max : 10.0 * std::sqrt(temperature_cap(model));
}

bool SolverConfig::spectral_transport() const {
    if (transport == TransportScheme::spectral) return true;
    if (transport == TransportScheme::upwind) return false;
    return is_power_of_two(n_x);
}

double SolverConfig::stability_bound(const ModelConfig& model, bool spatial) const {
    const double vm = resolved_v_max(model);
    const double dv = 2.0 * vm / (n_v - 1);
    double relax = model.reservoirs.eta();
    if (model.kind == CollisionKind::bgk) relax += model.alpha;
    double bound = 0.5 / relax;
    if (model.kind == CollisionKind::kfp)
        bound = std::min(bound, dv * dv / (2.0 * temperature_cap(model)));
    if (spatial && !spectral_transport()) {
        // RK2 with the one-sided second-order stencil is stable to CFL 1/2
        const double dx = model.domain.side_length / n_x;
        bound = std::min(bound, 0.5 * dx / vm);
    }
    return bound;
}

double SolverConfig::resolved_dt(const ModelConfig& model, bool spatial) const {
    const double bound = stability_bound(model, spatial);
    if (dt > 0.0) {
        if (dt > bound)
            throw SolverError("SolverConfig: dt exceeds the stability bound");
        return dt;
    }
    double auto_dt = 0.9 * bound;
    if (model.kind == CollisionKind::bgk)  // accuracy, not stability, limits BGK
        auto_dt = std::min(auto_dt, 0.1 / (model.alpha + model.reservoirs.eta()));
    return auto_dt;
}

// ---------------------------------------------------------------------------
// collision right-hand side shared by the homogeneous and spatial solvers

namespace {

class CollisionRhs {
public:
    CollisionRhs(const ModelConfig& model, double v_max, int n_v)
        : model_(model), op_(v_max, n_v), n_v_(n_v), v_max_(v_max) {
        for (const auto& r : model.reservoirs)
            reservoir_m_.push_back(discrete_maxwellian(v_max, n_v, r.temperature));
        bgk_m_.resize(static_cast<std::size_t>(n_v));
    }

    // prepare for one stage at grid temperature Tg
    void set_temperature(double t_grid) {
        t_grid_ = t_grid;
        if (model_.kind == CollisionKind::kfp) {
            op_.prepare(t_grid);
        } else {
            bgk_m_ = discrete_maxwellian(v_max_, n_v_, t_grid);
        }
    }

    // out = collision RHS for one column with local density rho
    void eval(std::span<const double> g, double rho, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        if (model_.kind == CollisionKind::kfp) {
            op_.apply(g, out);
        } else {
            for (int i = 0; i < n_v_; ++i)
                out[i] += model_.alpha * (rho * bgk_m_[i] - g[i]);
        }
        for (std::size_t j = 0; j < reservoir_m_.size(); ++j) {
            const double rate = model_.reservoirs[j].rate;
            const auto& m = reservoir_m_[j];
            for (int i = 0; i < n_v_; ++i) out[i] += rate * (rho * m[i] - g[i]);
        }
    }

private:
    const ModelConfig& model_;
    FokkerPlanckOperator op_;
    int n_v_;
    double v_max_;
    double t_grid_ = 0.0;
    std::vector<std::vector<double>> reservoir_m_;
    std::vector<double> bgk_m_;
};

double grid_temperature(const VelocityGrid& g) { return g.second_moment(); }

}  // namespace

HomogeneousResult solve_homogeneous(const SolverConfig& config, const ModelConfig& model,
                                    const VelocityGrid& g0,
                                    std::span<const double> checkpoints) {
    model.validate();
    if (model.domain.dimension != 1)
        throw SolverError("solve_homogeneous: only d = 1 grids are supported");
    if (checkpoints.empty()) throw std::invalid_argument("solve_homogeneous: no checkpoints");
    const double vm = config.resolved_v_max(model);
    if (g0.v_max() != vm || g0.size() != config.n_v)
        throw std::invalid_argument("solve_homogeneous: initial grid does not match config");
    if (std::abs(g0.mass() - 1.0) > 1e-6)
        throw std::invalid_argument("solve_homogeneous: initial grid not normalized");

    const double dt_target = config.resolved_dt(model, false);
    CollisionRhs rhs(model, vm, config.n_v);

    VelocityGrid g = g0;
    std::vector<double> k1(g.values().size()), k2(g.values().size()), gm(g.values().size());
    const double dv = g.spacing();
    auto span_temperature = [&](std::span<const double> values) {
        double acc = 0.0;
        for (int i = 0; i < config.n_v; ++i) {
            const double w = (i == 0 || i == config.n_v - 1) ? 0.5 : 1.0;
            const double v = -vm + i * dv;
            acc += w * v * v * values[i];
        }
        return acc * dv;
    };

    HomogeneousResult result;
    result.times.reserve(checkpoints.size());

    double t = 0.0;
    double prev_ck = 0.0;
    for (double ck : checkpoints) {
        if (ck <= prev_ck)
            throw std::invalid_argument("solve_homogeneous: checkpoints must increase");
        const int substeps = std::max(1, static_cast<int>(std::ceil((ck - prev_ck) / dt_target)));
        const double h = (ck - prev_ck) / substeps;
        for (int step = 0; step < substeps; ++step) {
            auto gv = g.values();
            rhs.set_temperature(span_temperature(gv));
            rhs.eval(gv, 1.0, k1);
            for (std::size_t i = 0; i < gv.size(); ++i) gm[i] = gv[i] + h * k1[i];
            // stage temperature from the stage state keeps the moment law second order
            rhs.set_temperature(span_temperature(gm));
            rhs.eval(gm, 1.0, k2);
            for (std::size_t i = 0; i < gv.size(); ++i)
                gv[i] += 0.5 * h * (k1[i] + k2[i]);
            enforce_positivity(gv, g.spacing(), result.clipped_mass, "solve_homogeneous");
        }
        t = ck;
        prev_ck = ck;
        const double mass = g.mass();
        if (std::abs(mass - 1.0) > 1e-6)
            throw SolverError("solve_homogeneous: mass drift above 1e-6 at t=" +
                              std::to_string(t));
        result.times.push_back(t);
        result.temperature.push_back(grid_temperature(g));
        result.snapshots.push_back(g);
    }
    return result;
}

// ---------------------------------------------------------------------------
// transport operators

namespace {

class SpectralTransport {
public:
    SpectralTransport(int n_x, int n_v, double side_length, std::span<const double> v_nodes)
        : n_x_(n_x), n_v_(n_v), n_k_(n_x / 2 + 1), side_length_(side_length),
          v_nodes_(v_nodes.begin(), v_nodes.end()) {
        real_ = fftw_alloc_real(static_cast<std::size_t>(n_x_) * n_v_);
        spec_ = fftw_alloc_complex(static_cast<std::size_t>(n_k_) * n_v_);
        // transform along x (stride n_v) for every velocity node at once
        int n[] = {n_x_};
        fwd_ = fftw_plan_many_dft_r2c(1, n, n_v_, real_, nullptr, n_v_, 1, spec_, nullptr,
                                      n_v_, 1, FFTW_ESTIMATE);
        bwd_ = fftw_plan_many_dft_c2r(1, n, n_v_, spec_, nullptr, n_v_, 1, real_, nullptr,
                                      n_v_, 1, FFTW_ESTIMATE);
        phase_.resize(static_cast<std::size_t>(n_k_) * n_v_);
    }

    ~SpectralTransport() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    SpectralTransport(const SpectralTransport&) = delete;
    SpectralTransport& operator=(const SpectralTransport&) = delete;

    void set_shift(double dt) {
        if (dt == phase_dt_) return;
        phase_dt_ = dt;
        for (int k = 0; k < n_k_; ++k) {
            const double wave = 2.0 * M_PI * k / side_length_;
            for (int iv = 0; iv < n_v_; ++iv)
                phase_[static_cast<std::size_t>(k) * n_v_ + iv] =
                    std::polar(1.0, -wave * v_nodes_[iv] * dt);
        }
    }

    // f(x, v) <- f(x - v dt, v), exact for band-limited data
    void shift(std::span<double> f) {
        std::memcpy(real_, f.data(), f.size() * sizeof(double));
        fftw_execute(fwd_);
        auto* spec = reinterpret_cast<std::complex<double>*>(spec_);
        const std::size_t total = static_cast<std::size_t>(n_k_) * n_v_;
        for (std::size_t i = 0; i < total; ++i) spec[i] *= phase_[i];
        fftw_execute(bwd_);
        const double scale = 1.0 / n_x_;
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = real_[i] * scale;
    }

private:
    int n_x_, n_v_, n_k_;
    double side_length_;
    std::vector<double> v_nodes_;
    double phase_dt_ = std::numeric_limits<double>::quiet_NaN();
    double* real_;
    fftw_complex* spec_;
    fftw_plan fwd_, bwd_;
    std::vector<std::complex<double>> phase_;
};

class UpwindTransport {
public:
    UpwindTransport(int n_x, int n_v, double side_length, std::span<const double> v_nodes)
        : n_x_(n_x), n_v_(n_v), dx_(side_length / n_x), v_nodes_(v_nodes.begin(), v_nodes.end()),
          scratch_(static_cast<std::size_t>(n_x) * n_v),
          scratch2_(static_cast<std::size_t>(n_x) * n_v),
          stage_(static_cast<std::size_t>(n_x) * n_v) {}

    void set_shift(double dt) { dt_ = dt; }

    void shift(std::span<double> f) {
        // RK2 on df/dt = -v df/dx with a second-order one-sided derivative
        derivative(f, scratch_);
        for (std::size_t i = 0; i < f.size(); ++i) stage_[i] = f[i] - dt_ * scratch_[i];
        derivative(stage_, scratch2_);
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] -= 0.5 * dt_ * (scratch_[i] + scratch2_[i]);
    }

private:
    void derivative(std::span<const double> f, std::span<double> out) {
        for (int ix = 0; ix < n_x_; ++ix) {
            const int xm1 = (ix - 1 + n_x_) % n_x_, xm2 = (ix - 2 + n_x_) % n_x_;
            const int xp1 = (ix + 1) % n_x_, xp2 = (ix + 2) % n_x_;
            for (int iv = 0; iv < n_v_; ++iv) {
                const double v = v_nodes_[iv];
                double dfdx;
                if (v >= 0.0)
                    dfdx = (3.0 * at(f, ix, iv) - 4.0 * at(f, xm1, iv) + at(f, xm2, iv)) /
                           (2.0 * dx_);
                else
                    dfdx = (-3.0 * at(f, ix, iv) + 4.0 * at(f, xp1, iv) - at(f, xp2, iv)) /
                           (2.0 * dx_);
                out[static_cast<std::size_t>(ix) * n_v_ + iv] = v * dfdx;
            }
        }
    }
    double at(std::span<const double> f, int ix, int iv) const {
        return f[static_cast<std::size_t>(ix) * n_v_ + iv];
    }

    int n_x_, n_v_;
    double dx_;
    double dt_ = 0.0;
    std::vector<double> v_nodes_;
    std::vector<double> scratch_, scratch2_, stage_;
};

}  // namespace

SpatialResult solve_spatial(const SolverConfig& config, const ModelConfig& model,
                            const PhaseGrid& f0, std::span<const double> checkpoints,
                            const VelocityGrid* reference) {
    model.validate();
    if (model.domain.dimension != 1)
        throw SolverError("solve_spatial: only d = 1 is supported");
    if (checkpoints.empty()) throw std::invalid_argument("solve_spatial: no checkpoints");
    const double vm = config.resolved_v_max(model);
    const double L = model.domain.side_length;
    if (f0.n_x() != config.n_x || f0.n_v() != config.n_v || f0.v_max() != vm ||
        f0.side_length() != L)
        throw std::invalid_argument("solve_spatial: initial grid does not match config");
    if (std::abs(f0.mass() - 1.0) > 1e-6)
        throw std::invalid_argument("solve_spatial: initial grid not normalized");
    if (reference && (reference->size() != config.n_v || reference->v_max() != vm))
        throw std::invalid_argument("solve_spatial: reference grid mismatch");

    const double dt_target = config.resolved_dt(model, true);
    const int n_v = config.n_v, n_x = config.n_x;

    std::vector<double> v_nodes(static_cast<std::size_t>(n_v));
    for (int iv = 0; iv < n_v; ++iv) v_nodes[iv] = -vm + iv * (2.0 * vm / (n_v - 1));

    std::unique_ptr<SpectralTransport> spectral;
    std::unique_ptr<UpwindTransport> upwind;
    if (config.spectral_transport())
        spectral = std::make_unique<SpectralTransport>(n_x, n_v, L, v_nodes);
    else
        upwind = std::make_unique<UpwindTransport>(n_x, n_v, L, v_nodes);
    auto transport = [&](std::span<double> f, double dtt) {
        if (spectral) {
            spectral->set_shift(dtt);
            spectral->shift(f);
        } else {
            upwind->set_shift(dtt);
            upwind->shift(f);
        }
    };

    CollisionRhs rhs(model, vm, n_v);
    PhaseGrid f = f0;
    SpatialResult result(f0);
    const std::size_t cells = f.values().size();
    std::vector<double> k1(cells), k2(cells), fm(cells);
    std::vector<double> rho(static_cast<std::size_t>(n_x));

    auto column_density = [&](std::span<const double> grid, int ix) {
        double acc = 0.0;
        for (int iv = 0; iv < n_v; ++iv) {
            const double w = (iv == 0 || iv == n_v - 1) ? 0.5 : 1.0;
            acc += w * grid[static_cast<std::size_t>(ix) * n_v + iv];
        }
        return acc * (2.0 * vm / (n_v - 1));
    };
    auto grid_temp = [&](std::span<const double> grid) {
        double acc = 0.0;
        for (int ix = 0; ix < n_x; ++ix)
            for (int iv = 0; iv < n_v; ++iv) {
                const double w = (iv == 0 || iv == n_v - 1) ? 0.5 : 1.0;
                acc += w * v_nodes[iv] * v_nodes[iv] *
                       grid[static_cast<std::size_t>(ix) * n_v + iv];
            }
        return acc * (2.0 * vm / (n_v - 1)) * (L / n_x);
    };
    auto collide = [&](std::span<double> grid, double h) {
        rhs.set_temperature(grid_temp(grid));
        for (int ix = 0; ix < n_x; ++ix) {
            const double r = column_density(grid, ix);
            rhs.eval(grid.subspan(static_cast<std::size_t>(ix) * n_v, n_v), r,
                     std::span<double>(k1).subspan(static_cast<std::size_t>(ix) * n_v, n_v));
        }
        for (std::size_t i = 0; i < cells; ++i) fm[i] = grid[i] + h * k1[i];
        rhs.set_temperature(grid_temp(fm));
        for (int ix = 0; ix < n_x; ++ix) {
            const double r = column_density(fm, ix);
            rhs.eval(std::span<const double>(fm).subspan(static_cast<std::size_t>(ix) * n_v, n_v),
                     r, std::span<double>(k2).subspan(static_cast<std::size_t>(ix) * n_v, n_v));
        }
        for (std::size_t i = 0; i < cells; ++i) grid[i] += 0.5 * h * (k1[i] + k2[i]);
    };

    auto record = [&](double t) {
        result.times.push_back(t);
        result.temperature.push_back(f.kinetic_temperature());
        double max_mom = 0.0, max_rho_dev = 0.0;
        std::vector<double> pressure(static_cast<std::size_t>(n_x));
        double pressure_mean = 0.0;
        for (int ix = 0; ix < n_x; ++ix) {
            double r = 0.0, mom = 0.0, en = 0.0;
            for (int iv = 0; iv < n_v; ++iv) {
                const double w = f.v_weight(iv);
                const double val = f.at(ix, iv);
                r += w * val;
                mom += w * v_nodes[iv] * val;
                en += w * v_nodes[iv] * v_nodes[iv] * val;
            }
            max_mom = std::max(max_mom, std::abs(mom));
            max_rho_dev = std::max(max_rho_dev, std::abs(r - 1.0 / L));
            const double u = (r > 1e-12) ? mom / r : 0.0;
            pressure[ix] = en - r * u * u;  // rho T
            pressure_mean += pressure[ix];
        }
        pressure_mean /= n_x;
        double max_p_dev = 0.0;
        for (double p : pressure) max_p_dev = std::max(max_p_dev, std::abs(p - pressure_mean));
        result.max_abs_momentum.push_back(max_mom);
        result.pressure_variation.push_back(max_p_dev);
        result.density_variation.push_back(max_rho_dev);
        if (reference) {
            double acc = 0.0;
            for (int ix = 0; ix < n_x; ++ix)
                for (int iv = 0; iv < n_v; ++iv)
                    acc += f.v_weight(iv) * std::abs(f.at(ix, iv) - (*reference)[iv] / L);
            result.l1_to_reference.push_back(acc * f.dx());
        }
    };

    double prev_ck = 0.0;
    for (double ck : checkpoints) {
        if (ck <= prev_ck)
            throw std::invalid_argument("solve_spatial: checkpoints must increase");
        const int substeps = std::max(1, static_cast<int>(std::ceil((ck - prev_ck) / dt_target)));
        const double h = (ck - prev_ck) / substeps;
        // telescoped Strang sweep: T(h/2) [C(h) T(h)]^{m-1} C(h) T(h/2)
        auto fv = f.values();
        transport(fv, 0.5 * h);
        for (int step = 0; step < substeps; ++step) {
            collide(fv, h);
            transport(fv, step + 1 < substeps ? h : 0.5 * h);
        }
        enforce_positivity(fv, f.dx() * f.dv(), result.clipped_mass, "solve_spatial");
        const double mass = f.mass();
        if (std::abs(mass - 1.0) > 1e-6)
            throw SolverError("solve_spatial: mass drift above 1e-6 at t=" + std::to_string(ck));
        prev_ck = ck;
        record(ck);
    }
    result.terminal = f;
    return result;
}

RateFit fit_exponential_rate(std::span<const std::pair<double, double>> series,
                             const FitWindow& window) {
    RateFit fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, d] : series) {
        if (d <= 0.0 || d <= window.d_min || d > window.d_max || t < window.t_min ||
            t > window.t_max) {
            ++fit.excluded;
            continue;
        }
        pts.emplace_back(t, std::log(d));
    }
    if (pts.size() < 5)
        throw std::invalid_argument("fit_exponential_rate: need at least 5 usable points");
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (const auto& [t, y] : pts) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double n = static_cast<double>(pts.size());
    const double denom = n * stt - st * st;
    if (denom <= 0.0) throw std::invalid_argument("fit_exponential_rate: degenerate times");
    const double slope = (n * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / n;
    double ss = 0.0;
    for (const auto& [t, y] : pts) {
        const double r = y - (intercept + slope * t);
        ss += r * r;
    }
    fit.amplitude = std::exp(intercept);
    fit.rate = -slope;
    fit.residual = std::sqrt(ss / n);
    fit.points = static_cast<int>(pts.size());
    return fit;
}

}  // namespace nessim
