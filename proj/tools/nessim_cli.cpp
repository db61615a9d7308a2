// Command-line front end: closed-form steady-state dumps, particle runs,
// grid solves, and the verification suite.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nessim/acceptance.hpp"
#include "nessim/config.hpp"
#include "nessim/diagnostics.hpp"
#include "nessim/model.hpp"
#include "nessim/particle.hpp"
#include "nessim/pde.hpp"
#include "nessim/steady_state.hpp"

namespace {

using namespace nessim;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct RunOptions {
    std::string config_path;
    std::vector<double> rates = {1.0, 1.0};
    std::vector<double> temps = {1.0, 3.0};
    double t0 = 3.0;
    double alpha = 1.0;
    double side_length = 1.0;
    std::string kind = "kfp";

    std::size_t n_particles = 100000;
    double t_end = 5.0;
    int checkpoints = 20;
    std::uint64_t seed = 1;
    std::string mode = "schedule";

    double v_max = 0.0;
    int n_v = 1024;
    int n_x = 128;
    double dt = 0.0;
    double perturbation = 0.5;

    // values from the config file unless the flag was given on the command line
    void absorb_config(const CLI::App& cmd) {
        if (config_path.empty()) return;
        const ConfigMap cfg = ConfigMap::parse_file(config_path);
        cfg.require_known_keys(kConfigSchema);
        auto keep = [&](const std::string& flag) {
            const CLI::Option* o = cmd.get_option_no_throw(flag);
            return o != nullptr && o->count() > 0;
        };
        if (!keep("--rates") && cfg.has("reservoir_rates"))
            rates = cfg.get_double_list("reservoir_rates");
        if (!keep("--temps") && cfg.has("reservoir_temps"))
            temps = cfg.get_double_list("reservoir_temps");
        if (!keep("--t0")) t0 = cfg.get_double("T0", t0);
        if (!keep("--alpha")) alpha = cfg.get_double("alpha", alpha);
        if (!keep("--length")) side_length = cfg.get_double("L", side_length);
        if (!keep("--model")) kind = cfg.get_string("kind", kind);
        if (!keep("--n"))
            n_particles = static_cast<std::size_t>(
                cfg.get_int("n_particles", static_cast<long>(n_particles)));
        if (!keep("--t-end")) t_end = cfg.get_double("t_end", t_end);
        if (!keep("--checkpoints"))
            checkpoints = static_cast<int>(cfg.get_int("checkpoints", checkpoints));
        if (!keep("--seed")) seed = cfg.get_seed("seed", seed);
        if (!keep("--mode")) mode = cfg.get_string("mode", mode);
        if (!keep("--v-max")) v_max = cfg.get_double("v_max", v_max);
        if (!keep("--n-v")) n_v = static_cast<int>(cfg.get_int("n_v", n_v));
        if (!keep("--n-x")) n_x = static_cast<int>(cfg.get_int("n_x", n_x));
        if (!keep("--dt")) dt = cfg.get_double("dt", dt);
        if (!keep("--perturbation")) perturbation = cfg.get_double("perturbation", perturbation);
    }

    ModelConfig model() const {
        if (rates.size() != temps.size())
            throw std::runtime_error("reservoir rates and temperatures differ in length");
        std::vector<Reservoir> rs;
        for (std::size_t j = 0; j < rates.size(); ++j) rs.push_back({rates[j], temps[j]});
        ModelConfig m{.domain = {1, side_length},
                      .reservoirs = ReservoirSet(std::move(rs)),
                      .kind = kind == "bgk" ? CollisionKind::bgk : CollisionKind::kfp,
                      .alpha = alpha,
                      .initial_temperature = t0};
        m.validate();
        return m;
    }

    SolverConfig solver() const {
        SolverConfig s;
        s.v_max = v_max;
        s.n_v = n_v;
        s.n_x = n_x;
        s.dt = dt;
        return s;
    }
};

void add_model_flags(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--config", opt.config_path, "key = value run configuration file");
    cmd->add_option("--rates", opt.rates, "reservoir interaction rates")->delimiter(',');
    cmd->add_option("--temps", opt.temps, "reservoir temperatures")->delimiter(',');
    cmd->add_option("--t0", opt.t0, "initial kinetic temperature");
    cmd->add_option("--alpha", opt.alpha, "BGK relaxation rate");
    cmd->add_option("--length", opt.side_length, "torus side length");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    return out;
}

// analytic velocity-NESS CDF for the configured model, when one exists
std::optional<std::function<double(double)>> ness_cdf(const ModelConfig& model) {
    const ReservoirSet& rs = model.reservoirs;
    if (model.kind == CollisionKind::bgk) {
        if (model.alpha == 0.0) return [&rs](double v) { return pure_reservoir_cdf(v, rs); };
        const double alpha = model.alpha;
        return [alpha, &rs](double v) { return bgk_ness_cdf(v, rs, alpha); };
    }
    if (rs.size() == 1) {
        const double t = rs.t_inf();
        return [t](double v) { return maxwellian_cdf(v, t); };
    }
    if (rs.size() == 2) return [&rs](double v) { return fp_ness_cdf(v, rs); };
    return std::nullopt;  // k > 2 drift-diffusion: no closed form, use `solve`
}

// TV between a sample histogram and the analytic bin masses
double histogram_tv(const Histogram& h, const std::function<double(double)>& cdf) {
    const auto& edges = h.edges();
    double acc = std::abs(h.underflow() / h.total() - cdf(edges.front()));
    acc += std::abs(h.overflow() / h.total() - (1.0 - cdf(edges.back())));
    for (int i = 0; i < h.n_bins(); ++i)
        acc += std::abs(h.count(i) / h.total() - (cdf(edges[i + 1]) - cdf(edges[i])));
    return 0.5 * acc;
}

const std::vector<std::string> kSeriesHeader = {"t",          "That_f", "T_sched",
                                                "l1_to_ness", "ks_D",   "tv"};

int run_ness(const RunOptions& opt, const std::string& out_path, const std::string& mixing_path,
             const std::string& kind, int n) {
    const ModelConfig model = opt.model();
    const double vmax = opt.v_max > 0.0 ? opt.v_max : 10.0 * std::sqrt(model.reservoirs.t_max());
    std::function<double(double)> density;
    if (kind == "bgk")
        density = [&](double v) { return bgk_ness_density(v, model.reservoirs, opt.alpha); };
    else if (kind == "pure")
        density = [&](double v) { return pure_reservoir_ness(v, model.reservoirs); };
    else
        density = [&](double v) { return fp_ness_density(v, model.reservoirs); };

    auto out = open_out(out_path);
    CsvWriter csv(out, {"v", "density"});
    for (int i = 0; i < n; ++i) {
        const double v = -vmax + 2.0 * vmax * i / (n - 1);
        const double row[] = {v, density(v)};
        csv.write_row(row);
    }
    std::cout << "wrote " << n << " density samples to " << out_path << "\n";

    if (!mixing_path.empty()) {
        const MixingMeasure w = MixingMeasure::from(model.reservoirs);
        auto mix = open_out(mixing_path);
        CsvWriter csv_mix(mix, {"v", "density"});  // abscissa is the mixing temperature
        for (int i = 0; i < n; ++i) {
            const double T = w.t_lo() + (w.t_hi() - w.t_lo()) * i / (n - 1);
            const double row[] = {T, w.density(T)};
            csv_mix.write_row(row);
        }
        std::cout << "wrote mixing density to " << mixing_path << "\n";
    }
    return 0;
}

int run_simulate(const RunOptions& opt, const std::string& out_path) {
    const ModelConfig model = opt.model();
    Ensemble ensemble = Ensemble::initial(model, opt.n_particles, opt.seed);
    SimRecord rec;
    if (model.kind == CollisionKind::bgk) {
        rec = simulate_bgk(ensemble, opt.t_end, opt.checkpoints);
    } else {
        const KfpMode mode = opt.mode == "self-consistent" ? KfpMode::self_consistent
                                                           : KfpMode::closed_form_schedule;
        rec = simulate_kfp(ensemble, opt.t_end, opt.checkpoints, mode);
    }

    const auto cdf = ness_cdf(model);
    auto out = open_out(out_path);
    CsvWriter csv(out, kSeriesHeader);
    for (const auto& ck : rec.checkpoints) {
        double tv = kNan, l1 = kNan;
        if (cdf) {
            tv = histogram_tv(ck.velocity_hist, *cdf);
            l1 = 2.0 * tv;
        }
        const double row[] = {ck.t, ck.temperature, ck.schedule_temperature, l1, kNan, tv};
        csv.write_row(row);
    }
    if (cdf) {
        const KsResult ks = ks_statistic(ensemble.v, *cdf);
        std::cout << "terminal KS statistic " << ks.statistic << " ("
                  << (ks.pass_99 ? "passes" : "fails") << " the 99% band)\n";
    }
    std::cout << "wrote " << rec.checkpoints.size() << " checkpoints to " << out_path << "\n";
    return 0;
}

int run_solve(const RunOptions& opt, bool spatial, const std::string& out_path,
              const std::string& terminal_path) {
    const ModelConfig model = opt.model();
    SolverConfig config = opt.solver();
    const double vmax = config.resolved_v_max(model);
    std::vector<double> checkpoints(static_cast<std::size_t>(opt.checkpoints));
    for (int i = 0; i < opt.checkpoints; ++i)
        checkpoints[i] = opt.t_end * (i + 1) / opt.checkpoints;

    // closed-form reference when available
    std::optional<VelocityGrid> reference;
    if (model.kind == CollisionKind::bgk)
        reference = VelocityGrid::sample(
            [&](double v) { return bgk_ness_density(v, model.reservoirs, model.alpha); }, vmax,
            config.n_v);
    else if (model.reservoirs.size() == 1)
        reference = VelocityGrid::sample(
            [&](double v) { return maxwellian_density(v, model.reservoirs.t_inf()); }, vmax,
            config.n_v);
    else if (model.reservoirs.size() == 2)
        reference = VelocityGrid::sample(
            [&](double v) { return fp_ness_density(v, model.reservoirs); }, vmax, config.n_v);

    const TemperatureSchedule schedule = model.schedule();
    auto out = open_out(out_path);
    CsvWriter csv(out, kSeriesHeader);

    if (spatial) {
        const double L = model.domain.side_length;
        PhaseGrid f0 = PhaseGrid::sample(
            [&](double x, double v) {
                return (1.0 + opt.perturbation * std::cos(2.0 * M_PI * x / L)) *
                       maxwellian_density(v, model.initial_temperature) / L;
            },
            L, config.n_x, vmax, config.n_v);
        f0.normalize();
        const SpatialResult run =
            solve_spatial(config, model, f0, checkpoints, reference ? &*reference : nullptr);
        for (std::size_t i = 0; i < run.times.size(); ++i) {
            const double l1 = reference ? run.l1_to_reference[i] : kNan;
            const double row[] = {run.times[i],
                                  run.temperature[i],
                                  temperature_at(schedule, run.times[i]),
                                  l1,
                                  kNan,
                                  reference ? 0.5 * l1 : kNan};
            csv.write_row(row);
        }
        if (!terminal_path.empty()) {
            auto term = open_out(terminal_path);
            CsvWriter grid_csv(term, {"x", "v", "f"});
            for (int ix = 0; ix < run.terminal.n_x(); ++ix)
                for (int iv = 0; iv < run.terminal.n_v(); ++iv) {
                    const double row[] = {run.terminal.x_node(ix), run.terminal.v_node(iv),
                                          run.terminal.at(ix, iv)};
                    grid_csv.write_row(row);
                }
            std::cout << "wrote terminal phase grid to " << terminal_path << "\n";
        }
    } else {
        VelocityGrid g0 = VelocityGrid::sample(
            [&](double v) { return maxwellian_density(v, model.initial_temperature); }, vmax,
            config.n_v);
        g0.normalize();
        const HomogeneousResult run = solve_homogeneous(config, model, g0, checkpoints);
        for (std::size_t i = 0; i < run.times.size(); ++i) {
            const double l1 = reference ? l1_distance(run.snapshots[i], *reference) : kNan;
            const double row[] = {run.times[i],
                                  run.temperature[i],
                                  temperature_at(schedule, run.times[i]),
                                  l1,
                                  kNan,
                                  reference ? 0.5 * l1 : kNan};
            csv.write_row(row);
        }
        if (!terminal_path.empty()) {
            auto term = open_out(terminal_path);
            CsvWriter ness_csv(term, {"v", "density"});
            const VelocityGrid& g = run.snapshots.back();
            for (int i = 0; i < g.size(); ++i) {
                const double row[] = {g.node(i), g[i]};
                ness_csv.write_row(row);
            }
            std::cout << "wrote terminal velocity density to " << terminal_path << "\n";
        }
    }
    std::cout << "wrote " << checkpoints.size() << " checkpoints to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kinetic models coupled to thermal reservoirs: steady states, "
                 "exact particle simulation, grid solvers, verification"};
    app.require_subcommand(1);

    RunOptions opt;

    auto* ness = app.add_subcommand("ness", "dump closed-form steady-state densities");
    add_model_flags(ness, opt);
    std::string ness_kind = "fp";
    std::string ness_out = "ness.csv";
    std::string mixing_out;
    int ness_n = 1025;
    ness->add_option("--kind", ness_kind, "fp | bgk | pure")
        ->check(CLI::IsMember({"fp", "bgk", "pure"}));
    ness->add_option("--n", ness_n, "number of velocity samples");
    ness->add_option("--v-max", opt.v_max, "velocity range (0 = auto)");
    ness->add_option("--out", ness_out, "density CSV path");
    ness->add_option("--mixing-out", mixing_out, "also dump the mixing density (fp only)");

    auto* sim = app.add_subcommand("simulate", "event-driven particle run");
    add_model_flags(sim, opt);
    std::string sim_out = "series.csv";
    sim->add_option("--model", opt.kind, "kfp | bgk")->check(CLI::IsMember({"kfp", "bgk"}));
    sim->add_option("--n", opt.n_particles, "particle count");
    sim->add_option("--t-end", opt.t_end, "end time");
    sim->add_option("--seed", opt.seed, "root seed");
    sim->add_option("--checkpoints", opt.checkpoints, "number of statistics checkpoints");
    sim->add_option("--mode", opt.mode, "schedule | self-consistent")
        ->check(CLI::IsMember({"schedule", "self-consistent"}));
    sim->add_option("--out", sim_out, "time-series CSV path");

    auto* solve = app.add_subcommand("solve", "deterministic grid run");
    add_model_flags(solve, opt);
    bool homogeneous = false, spatial = false;
    std::string solve_out = "series.csv";
    std::string terminal_out;
    solve->add_flag("--homogeneous", homogeneous, "velocity-space run");
    solve->add_flag("--spatial", spatial, "position-velocity run");
    solve->add_option("--model", opt.kind, "kfp | bgk")->check(CLI::IsMember({"kfp", "bgk"}));
    solve->add_option("--t-end", opt.t_end, "end time");
    solve->add_option("--checkpoints", opt.checkpoints, "number of checkpoints");
    solve->add_option("--n-v", opt.n_v, "velocity nodes");
    solve->add_option("--n-x", opt.n_x, "position nodes (spatial)");
    solve->add_option("--v-max", opt.v_max, "velocity range (0 = auto)");
    solve->add_option("--dt", opt.dt, "time step (0 = auto)");
    solve->add_option("--perturbation", opt.perturbation,
                      "initial density perturbation amplitude (spatial)");
    solve->add_option("--out", solve_out, "time-series CSV path");
    solve->add_option("--terminal-out", terminal_out, "terminal state CSV path");

    auto* verify = app.add_subcommand("verify", "run the verification suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(ness)) {
            opt.absorb_config(*ness);
            return run_ness(opt, ness_out, mixing_out, ness_kind, ness_n);
        }
        if (app.got_subcommand(sim)) {
            opt.absorb_config(*sim);
            return run_simulate(opt, sim_out);
        }
        if (app.got_subcommand(solve)) {
            opt.absorb_config(*solve);
            if (homogeneous == spatial)
                throw std::runtime_error("pick exactly one of --homogeneous / --spatial");
            return run_solve(opt, spatial, solve_out, terminal_out);
        }
        if (app.got_subcommand(verify)) {
            const auto results = nessim::acceptance::run_all(std::cout);
            const bool ok = nessim::acceptance::all_passed(results);
            std::cout << (ok ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << std::endl;
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
