// Event-driven exact Monte Carlo for the thermostatted models: Poisson
// reservoir interactions with exact transitions in between (degenerate
// diffusion for the drift-diffusion kind, free streaming for BGK). No time
// discretization exists anywhere in this module.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nessim/diagnostics.hpp"
#include "nessim/model.hpp"
#include "nessim/rng.hpp"

namespace nessim {

// N phase points with one random stream per particle (stream k is
// RandomStream::child(seed, k)).
struct Ensemble {
    ModelConfig model;
    int dimension = 1;
    double time = 0.0;
    std::vector<double> x;  // particle-major, [i*d + c]
    std::vector<double> v;
    std::vector<RandomStream> streams;

    std::size_t size() const { return streams.size(); }

    // x uniform on the box, v drawn from the Maxwellian at the model's T0
    static Ensemble initial(const ModelConfig& model, std::size_t n, std::uint64_t seed);

    double kinetic_temperature() const;
    std::vector<double> mean_velocity() const;
};

enum class KfpMode { closed_form_schedule, self_consistent };

struct CheckpointStats {
    double t = 0.0;
    double temperature = 0.0;           // ensemble estimate
    double schedule_temperature = 0.0;  // closed-form law at t
    std::vector<double> mean_velocity;
    Histogram velocity_hist;
    Histogram position_hist;
};

struct SimRecord {
    std::vector<CheckpointStats> checkpoints;
    std::vector<std::uint64_t> reservoir_counts;  // per reservoir, sorted by T
    std::uint64_t thermostat_count = 0;           // BGK only
};

// Exact event-driven run of the drift-diffusion model to t_end with
// n_checkpoints equally spaced statistics barriers. In self_consistent mode
// the transition temperature is frozen at the ensemble estimate between
// checkpoints instead of following the closed-form law.
SimRecord simulate_kfp(Ensemble& ensemble, double t_end, int n_checkpoints,
                       KfpMode mode = KfpMode::closed_form_schedule);

// BGK run: waiting times exponential(alpha + eta); an event is a thermostat
// resample from the schedule temperature with probability alpha/(alpha+eta),
// otherwise a reservoir resample; free streaming in between.
SimRecord simulate_bgk(Ensemble& ensemble, double t_end, int n_checkpoints);

// Empirical frequency of the event "exactly one Poisson(eta) arrival in
// (t0, t0 + 1/eta] and none in (t0 + 1/eta, t0 + 2/eta]"; equals e^{-2}
// for every eta and t0.
double event_e_frequency(std::size_t trials, double t0, double eta, RandomStream& rng);

// product partition of the phase cylinder with one velocity tail cell
struct PhasePartition {
    int n_x_cells = 16;
    int n_v_cells = 16;
    double v_max = 0.0;  // 0: auto, 10 sqrt(T_max)

    std::size_t n_cells() const {
        return static_cast<std::size_t>(n_x_cells) * n_v_cells + 1;
    }
};

struct TvSeries {
    std::vector<double> times;
    std::vector<double> tv;
    std::vector<double> se;
    std::vector<double> window_ratios;  // tv[k+1]/tv[k]
    std::vector<int> undersampled_cells;  // per time, cells with expected count < 5
    double doeblin_constant = 0.0;        // C from the coupling bound at this model
};

// Two clouds of n chains started at z0 and z1 at time t0, evolved under the
// full drift-diffusion jump process; TV between their binned laws at every
// multiple of 2/eta up to the horizon.
TvSeries coupled_tv_experiment(const ModelConfig& model, const PhasePoint& z0,
                               const PhasePoint& z1, double t0, double horizon,
                               const PhasePartition& partition, std::size_t n,
                               std::uint64_t seed);

}  // namespace nessim
