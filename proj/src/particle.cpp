#include "nessim/particle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nessim/ou_kernel.hpp"

namespace nessim {

Ensemble Ensemble::initial(const ModelConfig& model, std::size_t n, std::uint64_t seed) {
    model.validate();
    if (n < 1) throw std::invalid_argument("Ensemble: need at least one particle");
    Ensemble e{model, 1, 0.0, {}, {}, {}};
    e.dimension = model.domain.dimension;
    const double L = model.domain.side_length;
    const double sigma = std::sqrt(model.initial_temperature);
    e.x.resize(n * e.dimension);
    e.v.resize(n * e.dimension);
    e.streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng = RandomStream::child(seed, i);
        for (int c = 0; c < e.dimension; ++c) {
            e.x[i * e.dimension + c] = (rng.uniform() - 0.5) * L;
            e.v[i * e.dimension + c] = sigma * rng.normal();
        }
        e.streams.push_back(rng);
    }
    return e;
}

double Ensemble::kinetic_temperature() const {
    double acc = 0.0;
    for (double vel : v) acc += vel * vel;
    return acc / static_cast<double>(size() * dimension);
}

std::vector<double> Ensemble::mean_velocity() const {
    std::vector<double> mean(static_cast<std::size_t>(dimension), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (int c = 0; c < dimension; ++c) mean[c] += v[i * dimension + c];
    for (double& m : mean) m /= static_cast<double>(size());
    return mean;
}

namespace {

// reservoir index from the rate-proportional discrete law
std::size_t pick_reservoir(const ReservoirSet& rs, double eta, RandomStream& rng) {
    const double target = rng.uniform() * eta;
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < rs.size(); ++j) {
        acc += rs[j].rate;
        if (target < acc) return j;
    }
    return rs.size() - 1;
}

CheckpointStats collect_stats(const Ensemble& e, double t, double schedule_temp,
                              double v_range) {
    CheckpointStats st{.t = t,
                       .temperature = e.kinetic_temperature(),
                       .schedule_temperature = schedule_temp,
                       .mean_velocity = e.mean_velocity(),
                       .velocity_hist = Histogram::uniform(-v_range, v_range, 64),
                       .position_hist = Histogram::uniform(-0.5 * e.model.domain.side_length,
                                                           0.5 * e.model.domain.side_length, 64)};
    st.velocity_hist.add_samples(e.v);
    st.position_hist.add_samples(e.x);
    return st;
}

}  // namespace

SimRecord simulate_kfp(Ensemble& ensemble, double t_end, int n_checkpoints, KfpMode mode) {
    ensemble.model.validate();
    if (ensemble.size() == 0) throw std::invalid_argument("simulate_kfp: empty ensemble");
    if (t_end <= ensemble.time) throw std::invalid_argument("simulate_kfp: t_end in the past");
    if (n_checkpoints < 1) throw std::invalid_argument("simulate_kfp: need checkpoints");

    const ReservoirSet& rs = ensemble.model.reservoirs;
    const double eta = rs.eta();
    const double L = ensemble.model.domain.side_length;
    const int d = ensemble.dimension;
    const TemperatureSchedule global = ensemble.model.schedule();
    const double v_range = 10.0 * std::sqrt(rs.t_max());

    SimRecord record;
    record.reservoir_counts.assign(rs.size(), 0);

    const double t_start = ensemble.time;
    for (int ck = 1; ck <= n_checkpoints; ++ck) {
        const double t_a = ensemble.time;
        const double t_b = t_start + (t_end - t_start) * ck / n_checkpoints;
        // frozen-temperature law between checkpoints in self-consistent mode
        const TemperatureSchedule schedule =
            (mode == KfpMode::closed_form_schedule)
                ? global
                : TemperatureSchedule::constant(ensemble.kinetic_temperature());
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
            RandomStream& rng = ensemble.streams[i];
            PhasePoint p;
            p.x.assign(ensemble.x.begin() + i * d, ensemble.x.begin() + (i + 1) * d);
            p.v.assign(ensemble.v.begin() + i * d, ensemble.v.begin() + (i + 1) * d);
            double t = t_a;
            double next = t + rng.exponential(eta);
            while (next < t_b) {
                p = sample_ou_step(rng, t, next - t, p, schedule, L);
                const std::size_t j = pick_reservoir(rs, eta, rng);
                ++record.reservoir_counts[j];
                const double sigma = std::sqrt(rs[j].temperature);
                for (int c = 0; c < d; ++c) p.v[c] = sigma * rng.normal();
                t = next;
                next = t + rng.exponential(eta);
            }
            if (t_b > t) p = sample_ou_step(rng, t, t_b - t, p, schedule, L);
            std::copy(p.x.begin(), p.x.end(), ensemble.x.begin() + i * d);
            std::copy(p.v.begin(), p.v.end(), ensemble.v.begin() + i * d);
        }
        ensemble.time = t_b;
        record.checkpoints.push_back(
            collect_stats(ensemble, t_b, temperature_at(global, t_b), v_range));
    }
    return record;
}

SimRecord simulate_bgk(Ensemble& ensemble, double t_end, int n_checkpoints) {
    ensemble.model.validate();
    if (ensemble.model.kind != CollisionKind::bgk)
        throw std::invalid_argument("simulate_bgk: model kind must be BGK");
    if (ensemble.size() == 0) throw std::invalid_argument("simulate_bgk: empty ensemble");
    if (t_end <= ensemble.time) throw std::invalid_argument("simulate_bgk: t_end in the past");
    if (n_checkpoints < 1) throw std::invalid_argument("simulate_bgk: need checkpoints");

    const ReservoirSet& rs = ensemble.model.reservoirs;
    const double eta = rs.eta();
    const double alpha = ensemble.model.alpha;
    const double total_rate = alpha + eta;
    const double L = ensemble.model.domain.side_length;
    const int d = ensemble.dimension;
    const TemperatureSchedule schedule = ensemble.model.schedule();
    const double v_range = 10.0 * std::sqrt(rs.t_max());

    SimRecord record;
    record.reservoir_counts.assign(rs.size(), 0);

    auto stream_to = [&](std::size_t i, double from, double until) {
        for (int c = 0; c < d; ++c) {
            const std::size_t k = i * d + c;
            ensemble.x[k] = wrap_position(ensemble.x[k] + ensemble.v[k] * (until - from), L);
        }
    };

    const double t_start = ensemble.time;
    for (int ck = 1; ck <= n_checkpoints; ++ck) {
        const double t_a = ensemble.time;
        const double t_b = t_start + (t_end - t_start) * ck / n_checkpoints;
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
            RandomStream& rng = ensemble.streams[i];
            double t = t_a;
            double next = t + rng.exponential(total_rate);
            while (next < t_b) {
                stream_to(i, t, next);
                if (rng.uniform() * total_rate < alpha) {
                    ++record.thermostat_count;
                    const double sigma = std::sqrt(temperature_at(schedule, next));
                    for (int c = 0; c < d; ++c) ensemble.v[i * d + c] = sigma * rng.normal();
                } else {
                    const std::size_t j = pick_reservoir(rs, eta, rng);
                    ++record.reservoir_counts[j];
                    const double sigma = std::sqrt(rs[j].temperature);
                    for (int c = 0; c < d; ++c) ensemble.v[i * d + c] = sigma * rng.normal();
                }
                t = next;
                next = t + rng.exponential(total_rate);
            }
            stream_to(i, t, t_b);
        }
        ensemble.time = t_b;
        record.checkpoints.push_back(
            collect_stats(ensemble, t_b, temperature_at(schedule, t_b), v_range));
    }
    return record;
}

double event_e_frequency(std::size_t trials, double t0, double eta, RandomStream& rng) {
    if (trials < 1) throw std::invalid_argument("event_e_frequency: need trials");
    if (eta <= 0.0) throw std::invalid_argument("event_e_frequency: eta must be positive");
    const double half = 1.0 / eta;
    std::size_t hits = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        double t = t0;
        int in_first = 0;
        bool in_second = false;
        while (true) {
            t += rng.exponential(eta);
            if (t > t0 + 2.0 * half) break;
            if (t <= t0 + half)
                ++in_first;
            else
                in_second = true;
        }
        if (in_first == 1 && !in_second) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

namespace {

std::size_t partition_cell(const PhasePartition& part, double L, double v_max, double x,
                           double v) {
    if (std::abs(v) >= v_max) return part.n_cells() - 1;  // tail cell
    const int ix = std::min(part.n_x_cells - 1,
                            static_cast<int>((x / L + 0.5) * part.n_x_cells));
    const int iv = std::min(part.n_v_cells - 1,
                            static_cast<int>((v + v_max) / (2.0 * v_max) * part.n_v_cells));
    return static_cast<std::size_t>(ix) * part.n_v_cells + iv;
}

}  // namespace

TvSeries coupled_tv_experiment(const ModelConfig& model, const PhasePoint& z0,
                               const PhasePoint& z1, double t0, double horizon,
                               const PhasePartition& partition, std::size_t n,
                               std::uint64_t seed) {
    model.validate();
    if (model.domain.dimension != 1)
        throw std::invalid_argument("coupled_tv_experiment: d = 1 only");
    if (n < 100) throw std::invalid_argument("coupled_tv_experiment: need n >= 100");
    const ReservoirSet& rs = model.reservoirs;
    const double eta = rs.eta();
    const double L = model.domain.side_length;
    const double window = 2.0 / eta;
    const int n_windows = static_cast<int>(std::floor(horizon / window + 1e-12));
    if (n_windows < 1)
        throw std::invalid_argument("coupled_tv_experiment: horizon shorter than one window");
    const double v_max = partition.v_max > 0.0 ? partition.v_max
                                               : 10.0 * std::sqrt(rs.t_max());
    const TemperatureSchedule schedule = model.schedule();

    const std::size_t cells = partition.n_cells();
    std::vector<std::vector<double>> counts[2];
    for (auto& c : counts) c.assign(static_cast<std::size_t>(n_windows), std::vector<double>(cells, 0.0));

    for (int cloud = 0; cloud < 2; ++cloud) {
        const PhasePoint& start = cloud == 0 ? z0 : z1;
        for (std::size_t chain = 0; chain < n; ++chain) {
            RandomStream rng =
                RandomStream::child(seed, chain + static_cast<std::size_t>(cloud) * n);
            PhasePoint p = start;
            p.x[0] = wrap_position(p.x[0], L);
            double t = t0;
            double next_event = t + rng.exponential(eta);
            for (int w = 0; w < n_windows; ++w) {
                const double t_target = t0 + (w + 1) * window;
                while (next_event < t_target) {
                    p = sample_ou_step(rng, t, next_event - t, p, schedule, L);
                    const std::size_t j = pick_reservoir(rs, eta, rng);
                    p.v[0] = std::sqrt(rs[j].temperature) * rng.normal();
                    t = next_event;
                    next_event = t + rng.exponential(eta);
                }
                if (t_target > t) {
                    p = sample_ou_step(rng, t, t_target - t, p, schedule, L);
                    t = t_target;
                }
                counts[cloud][w][partition_cell(partition, L, v_max, p.x[0], p.v[0])] += 1.0;
            }
        }
    }

    TvSeries series;
    series.doeblin_constant =
        doeblin_lower_bound(schedule, L, std::max(t0, stationary_start_time(schedule)));
    RandomStream boot = RandomStream::child(seed, 2 * n + 1);
    for (int w = 0; w < n_windows; ++w) {
        series.times.push_back(t0 + (w + 1) * window);
        const TvResult tv = tv_counts(counts[0][w], counts[1][w], boot);
        series.tv.push_back(tv.tv);
        series.se.push_back(tv.se);
        int under = 0;
        for (std::size_t cell = 0; cell < cells; ++cell)
            if (0.5 * (counts[0][w][cell] + counts[1][w][cell]) < 5.0) ++under;
        series.undersampled_cells.push_back(under);
    }
    for (int w = 0; w + 1 < n_windows; ++w)
        series.window_ratios.push_back(series.tv[w] > 0.0 ? series.tv[w + 1] / series.tv[w]
                                                          : 1.0);
    return series;
}

}  // namespace nessim
