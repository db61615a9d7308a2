// Core vocabulary: reservoirs, the global temperature relaxation law,
// Maxwellian velocity densities, torus geometry and phase points.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace nessim {

// One thermal reservoir: Poisson interaction rate and temperature
// (energy units, Boltzmann constant 1).
struct Reservoir {
    double rate;
    double temperature;
};

// Ordered collection of reservoirs. Sorted by temperature on construction;
// carries the total rate eta = sum rate_j and the rate-weighted equilibrium
// temperature T_inf = sum(rate_j T_j)/eta.
class ReservoirSet {
public:
    explicit ReservoirSet(std::vector<Reservoir> reservoirs);

    std::size_t size() const { return items_.size(); }
    const Reservoir& operator[](std::size_t j) const { return items_[j]; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    double eta() const { return eta_; }
    double t_inf() const { return t_inf_; }
    double t_min() const { return items_.front().temperature; }
    double t_max() const { return items_.back().temperature; }

private:
    std::vector<Reservoir> items_;
    double eta_;
    double t_inf_;
};

// (eta, T_inf) of a reservoir collection; invariant under permutations of
// the input list. Empty lists are rejected.
struct EquilibriumParameters {
    double eta;
    double t_inf;
};
EquilibriumParameters equilibrium_parameters(const ReservoirSet& reservoirs);

// Global kinetic temperature path T(t) = T_inf + exp(-eta t) (T0 - T_inf),
// the solution of dT/dt = sum_j rate_j (T_j - T).
struct TemperatureSchedule {
    double t_inf;
    double t0;
    double eta;

    double operator()(double t) const { return temperature_at(*this, t); }

    static TemperatureSchedule from(const ReservoirSet& reservoirs, double initial_temperature) {
        if (initial_temperature <= 0.0)
            throw std::invalid_argument("TemperatureSchedule: T0 must be positive");
        return {reservoirs.t_inf(), initial_temperature, reservoirs.eta()};
    }

    static TemperatureSchedule constant(double temperature) {
        if (temperature <= 0.0)
            throw std::invalid_argument("TemperatureSchedule: temperature must be positive");
        return {temperature, temperature, 1.0};
    }

    friend double temperature_at(const TemperatureSchedule& schedule, double t) {
        if (t < 0.0) throw std::invalid_argument("temperature_at: negative time");
        return schedule.t_inf + std::exp(-t * schedule.eta) * (schedule.t0 - schedule.t_inf);
    }
};

// Periodic box [-L/2, L/2)^d.
struct DomainSpec {
    int dimension = 1;
    double side_length = 1.0;
};

// Reduce a coordinate into [-L/2, L/2).
inline double wrap_position(double x, double side_length) {
    const double w = x - side_length * std::floor(x / side_length + 0.5);
    // floor rounding can land exactly on +L/2
    return (w >= 0.5 * side_length) ? w - side_length : w;
}

struct PhasePoint {
    std::vector<double> x;
    std::vector<double> v;
};

inline PhasePoint make_phase_point(double x, double v, double side_length) {
    return {{wrap_position(x, side_length)}, {v}};
}

enum class CollisionKind { kfp, bgk };

struct ModelConfig {
    DomainSpec domain;
    ReservoirSet reservoirs;
    CollisionKind kind = CollisionKind::kfp;
    double alpha = 1.0;   // BGK relaxation rate; ignored for KFP
    double initial_temperature;

    void validate() const {
        if (domain.dimension < 1) throw std::invalid_argument("ModelConfig: dimension must be >= 1");
        if (domain.side_length <= 0.0) throw std::invalid_argument("ModelConfig: side length must be positive");
        if (initial_temperature <= 0.0) throw std::invalid_argument("ModelConfig: T0 must be positive");
        if (kind == CollisionKind::bgk && alpha < 0.0)
            throw std::invalid_argument("ModelConfig: BGK alpha must be nonnegative");
    }

    TemperatureSchedule schedule() const {
        return TemperatureSchedule::from(reservoirs, initial_temperature);
    }
};

// Centered Maxwellian density (2 pi T)^{-d/2} exp(-|v|^2 / 2T).
double maxwellian_density(std::span<const double> v, double temperature);
inline double maxwellian_density(double v, double temperature) {
    return maxwellian_density(std::span<const double>(&v, 1), temperature);
}

// CDF of the one-dimensional Maxwellian marginal.
double maxwellian_cdf(double v, double temperature);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace nessim
