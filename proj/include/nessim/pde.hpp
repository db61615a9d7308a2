// Deterministic grid solvers: the spatially homogeneous velocity-space
// equation for both collision kinds, and the 1-d inhomogeneous equation via
// Strang transport/collision splitting, plus exponential-rate fitting.
#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nessim/model.hpp"
#include "nessim/phase_grid.hpp"
#include "nessim/velocity_grid.hpp"

namespace nessim {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TransportScheme { automatic, spectral, upwind };

struct SolverConfig {
    double v_max = 0.0;  // 0: auto, 10 sqrt(max reservoir/initial temperature)
    int n_v = 1024;
    int n_x = 1;
    double dt = 0.0;     // 0: auto, 90% of the stability bound
    TransportScheme transport = TransportScheme::automatic;

    // dt stability bound: dv^2 / (2 T_cap) for the drift-diffusion operator
    // under explicit RK2, combined with 0.5/(alpha+eta) relaxation and, for
    // the upwind transport path, 0.5 dx / v_max.
    double stability_bound(const ModelConfig& model, bool spatial) const;
    double resolved_v_max(const ModelConfig& model) const;
    double resolved_dt(const ModelConfig& model, bool spatial) const;
    bool spectral_transport() const;
};

struct HomogeneousResult {
    std::vector<double> times;
    std::vector<double> temperature;       // grid kinetic temperature at checkpoints
    std::vector<VelocityGrid> snapshots;
    double clipped_mass = 0.0;             // total negative mass removed
};

// Advance dg/dt = G_{T_g(t)} g + sum_j eta_j (m_{T_j} - g) (drift-diffusion)
// or dg/dt = alpha (m_{T_g(t)} - g) + sum_j eta_j (m_{T_j} - g) (BGK), with
// T_g(t) recomputed from the grid at every stage. Aborts on instability
// (negative density beyond -1e-10 or mass drift above 1e-6).
HomogeneousResult solve_homogeneous(const SolverConfig& config, const ModelConfig& model,
                                    const VelocityGrid& g0,
                                    std::span<const double> checkpoints);

struct SpatialResult {
    explicit SpatialResult(PhaseGrid terminal_state) : terminal(std::move(terminal_state)) {}

    std::vector<double> times;
    std::vector<double> temperature;
    std::vector<double> l1_to_reference;   // empty when no reference given
    std::vector<double> max_abs_momentum;  // max_x |rho u|
    std::vector<double> pressure_variation;// max_x |rho T - mean(rho T)|
    std::vector<double> density_variation; // max_x |rho - 1/L|
    PhaseGrid terminal;
    double clipped_mass = 0.0;
};

// Strang splitting: exact spectral shift in x (power-of-two n_x) or
// second-order upwind, around a per-column collision/reservoir step with the
// global grid temperature. reference, when given, is the velocity NESS; the
// phase-space reference is reference(v)/L.
SpatialResult solve_spatial(const SolverConfig& config, const ModelConfig& model,
                            const PhaseGrid& f0, std::span<const double> checkpoints,
                            const VelocityGrid* reference = nullptr);

struct FitWindow {
    double t_min = -1e300;
    double t_max = 1e300;
    double d_min = 0.0;   // points with distance <= d_min are excluded
    double d_max = 1e300;
};

struct RateFit {
    double amplitude = 0.0;  // C in C exp(-c t)
    double rate = 0.0;       // c
    double residual = 0.0;   // rms of log-space fit residuals
    int points = 0;
    int excluded = 0;        // nonpositive or out-of-window distances
};

// Least-squares line through (t, log d) over the window; needs >= 5 points.
RateFit fit_exponential_rate(std::span<const std::pair<double, double>> series,
                             const FitWindow& window = {});

}  // namespace nessim
