#include "nessim/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "nessim/diagnostics.hpp"
#include "nessim/model.hpp"
#include "nessim/ou_kernel.hpp"
#include "nessim/particle.hpp"
#include "nessim/pde.hpp"
#include "nessim/quadrature.hpp"
#include "nessim/steady_state.hpp"

namespace nessim::acceptance {

namespace {

constexpr std::uint64_t kRootSeed = 0x5eedf00d2024ULL;

const ReservoirSet& symmetric_reservoirs() {
    static const ReservoirSet rs({{1.0, 1.0}, {1.0, 3.0}});
    return rs;
}

ModelConfig base_model(CollisionKind kind) {
    return {.domain = {1, 1.0},
            .reservoirs = symmetric_reservoirs(),
            .kind = kind,
            .alpha = 1.0,
            .initial_temperature = 3.0};
}

std::vector<double> uniform_checkpoints(double t_end, int n) {
    std::vector<double> ck(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ck[i] = t_end * (i + 1) / n;
    return ck;
}

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << "FAILED: " << what;
        }
    }
    void note(const std::string& s) {
        if (detail.tellp() > 0) detail << "; ";
        detail << s;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// --- criterion bodies -------------------------------------------------------

Check criterion_temperature_law() {
    Check c;
    const ModelConfig model = base_model(CollisionKind::kfp);
    Ensemble e = Ensemble::initial(model, 100000, kRootSeed + 1);
    const SimRecord rec = simulate_kfp(e, 5.0, 20);
    const double se = std::sqrt(2.0 / 100000.0);
    double worst = 0.0;
    for (const auto& ck : rec.checkpoints) {
        const double sigma_units =
            std::abs(ck.temperature - ck.schedule_temperature) / (ck.schedule_temperature * se);
        worst = std::max(worst, sigma_units);
    }
    c.require(worst <= 3.0, "empirical temperature left the 3 SE band");
    c.note("max deviation " + fmt(worst) + " SE over 20 checkpoints");
    return c;
}

Check criterion_ness_stationarity() {
    Check c;
    const double vmax = 10.0 * std::sqrt(3.0);
    auto residual_at = [&](int n) {
        const VelocityGrid g = VelocityGrid::sample(
            [&](double v) { return fp_ness_density(v, symmetric_reservoirs()); }, vmax, n);
        return stationarity_residual(g, symmetric_reservoirs(), CollisionKind::kfp);
    };
    const double r2048 = residual_at(2048);
    const double r4096 = residual_at(4096);
    c.require(r2048 < 1e-4, "residual at 2048 nodes not below 1e-4");
    const double ratio = r2048 / r4096;
    c.require(ratio > 3.3 && ratio < 4.7, "residual not decreasing ~4x under refinement");
    c.note("residual " + fmt(r2048) + ", refinement ratio " + fmt(ratio));
    return c;
}

Check criterion_mixing_identities() {
    Check c;
    for (double eta : {0.5, 1.0, 2.0, 4.0}) {
        const ReservoirSet rs({{0.5 * eta, 1.0}, {0.5 * eta, 3.0}});
        const MixingMeasure w = MixingMeasure::from(rs);
        const double mass = w.integrate_against([](double) { return 1.0; });
        const double mean = w.integrate_against([](double T) { return T; });
        c.require(std::abs(mass - 1.0) <= 1e-10,
                  "mixing mass off at eta=" + fmt(eta) + " (err " + fmt(std::abs(mass - 1.0)) + ")");
        c.require(std::abs(mean - rs.t_inf()) <= 1e-10,
                  "mixing mean off at eta=" + fmt(eta));
    }
    // concentration at the reservoir temperatures as eta -> infinity
    {
        const double p1 = 0.3, eta = 2000.0;
        const MixingMeasure w =
            MixingMeasure::from(ReservoirSet({{p1 * eta, 1.0}, {(1.0 - p1) * eta, 3.0}}));
        RandomStream rng(kRootSeed + 3);
        const int n = 100000;
        int near_t1 = 0;
        for (int i = 0; i < n; ++i)
            if (w.sample(rng) < 1.01) ++near_t1;
        const double freq = static_cast<double>(near_t1) / n;
        c.require(std::abs(freq - p1) <= 3.0 * std::sqrt(p1 * (1.0 - p1) / n) + 1e-4,
                  "high-rate limit: mass near T_1 misses eta_1/eta");
    }
    // collapse onto T_inf as eta -> 0
    {
        const MixingMeasure w = MixingMeasure::from(ReservoirSet({{5e-4, 1.0}, {5e-4, 3.0}}));
        RandomStream rng(kRootSeed + 4);
        const int n = 100000;
        int close = 0;
        for (int i = 0; i < n; ++i)
            if (std::abs(w.sample(rng) - 2.0) < 0.02) ++close;
        c.require(close > 99000, "low-rate limit: samples do not concentrate at T_inf");
    }
    c.note("mass/mean identities at 1e-10; both rate limits hold");
    return c;
}

Check criterion_homogeneous_convergence() {
    Check c;
    const ModelConfig model = base_model(CollisionKind::kfp);
    SolverConfig config;
    config.n_v = 1024;
    const double vmax = config.resolved_v_max(model);
    VelocityGrid g0 = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 3.0); }, vmax, config.n_v);
    g0.normalize();
    const HomogeneousResult run =
        solve_homogeneous(config, model, g0, uniform_checkpoints(20.0, 100));
    const VelocityGrid ness = VelocityGrid::sample(
        [&](double v) { return fp_ness_density(v, symmetric_reservoirs()); }, vmax, config.n_v);
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i < run.times.size(); ++i)
        series.emplace_back(run.times[i], l1_distance(run.snapshots[i], ness));
    const double final_l1 = series.back().second;
    c.require(final_l1 < 1e-3, "terminal L1 distance to the mixture not below 1e-3");
    FitWindow window;
    window.d_min = 1e-2;
    window.d_max = 1e-1;
    const RateFit fit = fit_exponential_rate(series, window);
    c.require(fit.rate > 0.0, "fitted rate not positive");
    c.require(fit.residual < 0.05, "log-linear fit residual above 0.05");
    c.note("L1 " + fmt(final_l1) + ", rate " + fmt(fit.rate) + ", fit residual " +
           fmt(fit.residual));
    return c;
}

Check criterion_bgk_ness() {
    Check c;
    ModelConfig model = base_model(CollisionKind::bgk);
    SolverConfig config;
    config.n_v = 1024;
    const double vmax = config.resolved_v_max(model);
    VelocityGrid g0 = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 3.0); }, vmax, config.n_v);
    g0.normalize();
    const HomogeneousResult run =
        solve_homogeneous(config, model, g0, uniform_checkpoints(15.0, 15));
    const VelocityGrid ness = VelocityGrid::sample(
        [&](double v) { return bgk_ness_density(v, symmetric_reservoirs(), 1.0); }, vmax,
        config.n_v);
    const double l1 = l1_distance(run.snapshots.back(), ness);
    c.require(l1 < 1e-6, "solver terminal state not within 1e-6 of the closed form");

    Ensemble e = Ensemble::initial(model, 100000, kRootSeed + 5);
    simulate_bgk(e, 20.0, 4);
    const KsResult ks = ks_statistic(
        e.v, [&](double v) { return bgk_ness_cdf(v, symmetric_reservoirs(), 1.0); });
    c.require(ks.pass_99, "particle histogram fails KS at 99%");
    c.note("solver L1 " + fmt(l1) + ", particle KS D*sqrt(N) " +
           fmt(ks.statistic * std::sqrt(static_cast<double>(ks.n))));
    return c;
}

// independent quadrature route for the transition moments
struct OracleMoments {
    double var_v, var_x, cov;
};
OracleMoments transition_moment_oracle(double s, double u, const TemperatureSchedule& sched) {
    const double t = s + u;
    auto temp = [&](double r) {
        return sched.t_inf + std::exp(-sched.eta * r) * (sched.t0 - sched.t_inf);
    };
    OracleMoments o{};
    o.var_v = integrate_or_throw(
        [&](double r) { return std::exp(2.0 * (r - t)) * 2.0 * temp(r); }, s, t, 1e-14, 1e-12);
    o.var_x = integrate_or_throw(
        [&](double r) {
            const double g = 1.0 - std::exp(r - t);
            return g * g * 2.0 * temp(r);
        },
        s, t, 1e-14, 1e-12);
    o.cov = integrate_or_throw(
        [&](double r) { return std::exp(r - t) * (1.0 - std::exp(r - t)) * 2.0 * temp(r); }, s,
        t, 1e-14, 1e-12);
    return o;
}

Check criterion_transition_exactness() {
    Check c;
    RandomStream rng(kRootSeed + 6);
    double worst = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
        double eta;
        const double pick = rng.uniform();
        if (pick < 0.2)
            eta = 1.0 + (rng.uniform() - 0.5) * 2e-3;  // straddles eta = 1
        else if (pick < 0.4)
            eta = 2.0 + (rng.uniform() - 0.5) * 2e-3;  // straddles eta = 2
        else
            eta = 0.1 + 4.9 * rng.uniform();
        const TemperatureSchedule sched{0.5 + 4.0 * rng.uniform(), 0.5 + 4.0 * rng.uniform(),
                                        eta};
        const double s = 3.0 * rng.uniform();
        const double u = 0.01 + 4.0 * rng.uniform();
        const OUMoments m = ou_moments(s, u, 0.0, 0.0, sched);
        const OracleMoments o = transition_moment_oracle(s, u, sched);
        worst = std::max(worst, std::abs(m.var_v - o.var_v) / o.var_v);
        worst = std::max(worst, std::abs(m.var_x - o.var_x) / o.var_x);
        worst = std::max(worst, std::abs(m.cov - o.cov) / std::max(std::abs(o.cov), 1e-12));
    }
    c.require(worst < 1e-8, "closed-form moments deviate from the quadrature oracle");

    // composability in law
    const TemperatureSchedule sched{2.0, 3.0, 2.0};
    RandomStream sampler(kRootSeed + 7);
    const int n = 100000;
    std::vector<double> x2(n), v2(n), x1(n), v1(n);
    const PhasePoint start{{0.1}, {-0.6}};
    for (int i = 0; i < n; ++i) {
        PhasePoint mid = sample_ou_step(sampler, 0.2, 0.45, start, sched, 1.0);
        PhasePoint end = sample_ou_step(sampler, 0.65, 0.8, mid, sched, 1.0);
        x2[i] = end.x[0];
        v2[i] = end.v[0];
        const PhasePoint direct = sample_ou_step(sampler, 0.2, 1.25, start, sched, 1.0);
        x1[i] = direct.x[0];
        v1[i] = direct.v[0];
    }
    c.require(ks_two_sample(x2, x1).pass_99, "composed position law differs");
    c.require(ks_two_sample(v2, v1).pass_99, "composed velocity law differs");
    c.note("max moment error " + fmt(worst) + " over 500 draws");
    return c;
}

Check criterion_asymptotic_bounds() {
    Check c;
    std::vector<double> grid;
    for (int i = 0; i < 200; ++i)
        grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 199.0));
    const AsymptoticBoundsReport rep = asymptotic_bounds_check(grid, 2.0);
    c.require(rep.envelope_ok, "correlation envelope violated");
    c.require(rep.rho_monotone_ok, "monotone product check failed");
    c.require(rep.var_x_window_ok, "position-variance window failed");
    c.require(rep.small_u_ok, "small-u correlation limit failed");
    const double rho0 = stationary_rho(1e-6);
    c.require(std::abs(rho0 - 0.8660254) <= 1e-3, "rho(0+) != sqrt(3)/2 within 1e-3");
    const double tail = stationary_rho(1e3) * std::sqrt(1.0 + 1e3 / 5.0);
    c.require(std::abs(tail - 1.0 / std::sqrt(10.0)) <= 1e-2, "large-u product limit missed");
    c.note("rho(0+) " + fmt(rho0) + ", tail product " + fmt(tail));
    return c;
}

Check criterion_event_probability() {
    Check c;
    RandomStream rng(kRootSeed + 8);
    const double p = std::exp(-2.0);
    const int trials = 100000;
    const double band = 3.0 * std::sqrt(p * (1.0 - p) / trials);
    for (double eta : {0.3, 1.0, 7.0}) {
        const double freq = event_e_frequency(trials, 2.0, eta, rng);
        c.require(std::abs(freq - p) <= band,
                  "event frequency off at eta=" + fmt(eta) + " (" + fmt(freq) + ")");
    }
    c.note("e^-2 = " + fmt(p) + " within " + fmt(band) + " for eta in {0.3,1,7}");
    return c;
}

Check criterion_doeblin_machinery() {
    Check c;
    // exact sub-multiplicativity on random finite kernels
    RandomStream rng(kRootSeed + 9);
    std::vector<FiniteKernel> kernels;
    for (int i = 0; i < 201; ++i) kernels.push_back(FiniteKernel::random(5, rng));
    const SubmultReport sub = doeblin_submultiplicativity_check(kernels);
    c.require(sub.ok && sub.pairs_checked >= 200, "finite-kernel sub-multiplicativity violated");

    // pointwise lower bound from the coupling constant
    const ModelConfig model = base_model(CollisionKind::kfp);
    const TemperatureSchedule sched = model.schedule();
    const double L = model.domain.side_length;
    const double s0 = stationary_start_time(sched);
    const double cc = doeblin_lower_bound(sched, L, s0);
    c.require(cc > 0.0 && cc <= 1.0, "coupling constant outside (0,1]");
    double min_density = 1e300;
    for (double s : {s0, s0 + 0.4}) {
        for (int iu = 0; iu <= 8; ++iu) {
            const double u = (1.0 + iu / 8.0) / sched.eta;
            for (double a : {-0.45, 0.0, 0.3})
                for (double b : {-4.0, -0.5, 0.0, 1.5, 5.0}) {
                    const OUMoments m = ou_moments(s, u, a, b, sched);
                    for (double x : {-0.5, -0.21, 0.04, 0.33, 0.49})
                        for (double v : {-5.0, -1.0, 0.2, 2.0, 6.0})
                            min_density =
                                std::min(min_density, wrapped_conditional_density(x, v, m, L));
                }
        }
    }
    c.require(cc / L <= min_density * (1.0 + 1e-9),
              "wrapped conditional density fell below C/L");

    // contraction of two coupled clouds
    PhasePartition part;
    part.n_x_cells = 16;
    part.n_v_cells = 16;
    part.v_max = 8.0;
    const PhasePoint z0{{-0.4}, {-3.0}};
    const PhasePoint z1{{0.45}, {4.0}};
    const double t0 = 8.0;
    const TvSeries series =
        coupled_tv_experiment(model, z0, z1, t0, 6.0, part, 100000, kRootSeed + 10);
    const double bound = 1.0 - std::exp(-2.0) * series.doeblin_constant *
                                   series.doeblin_constant;
    c.require(series.tv.front() <= bound + 3.0 * series.se.front(),
              "one-window TV above the coupling bound");
    for (std::size_t i = 0; i + 1 < series.tv.size(); ++i) {
        const double joint =
            std::sqrt(series.se[i] * series.se[i] + series.se[i + 1] * series.se[i + 1]);
        c.require(series.tv[i + 1] <= series.tv[i] + 3.0 * joint,
                  "TV series increased beyond noise");
    }
    c.note("C " + fmt(series.doeblin_constant) + ", first-window TV " + fmt(series.tv.front()) +
           " <= " + fmt(bound));
    return c;
}

Check criterion_spatial_flattening() {
    Check c;
    const ModelConfig model = base_model(CollisionKind::kfp);
    SolverConfig config;
    config.n_v = 512;
    config.n_x = 128;
    const double vmax = config.resolved_v_max(model);
    const double L = model.domain.side_length;
    PhaseGrid f0 = PhaseGrid::sample(
        [&](double x, double v) {
            return (1.0 + 0.5 * std::cos(2.0 * M_PI * x / L)) * maxwellian_density(v, 3.0) / L;
        },
        L, config.n_x, vmax, config.n_v);
    f0.normalize();
    const VelocityGrid ness = VelocityGrid::sample(
        [&](double v) { return fp_ness_density(v, symmetric_reservoirs()); }, vmax, config.n_v);
    const SpatialResult run =
        solve_spatial(config, model, f0, uniform_checkpoints(20.0, 20), &ness);
    c.require(run.l1_to_reference.back() < 1e-2,
              "terminal L1 distance to the uniform steady state not below 1e-2");
    c.require(run.max_abs_momentum.back() <= 1e-6, "terminal momentum density above 1e-6");
    c.require(run.pressure_variation.back() <= 1e-4, "terminal pressure varies above 1e-4");

    // particle positions flatten as well
    Ensemble e = Ensemble::initial(model, 50000, kRootSeed + 11);
    simulate_kfp(e, 15.0, 3);
    std::vector<double> counts(64, 0.0);
    for (double x : e.x)
        counts[std::min(63, static_cast<int>((x / L + 0.5) * 64.0))] += 1.0;
    const ChiSquareResult chi = chi_square_uniform(counts);
    c.require(chi.p_value > 0.01, "particle position marginal fails uniformity");
    c.note("L1 " + fmt(run.l1_to_reference.back()) + ", max|rho u| " +
           fmt(run.max_abs_momentum.back()) + ", pressure var " +
           fmt(run.pressure_variation.back()) + ", chi2 p " + fmt(chi.p_value));
    return c;
}

Check criterion_entropy_diagnostic() {
    Check c;
    ModelConfig model{.domain = {1, 1.0},
                      .reservoirs = ReservoirSet({{1.0, 2.0}}),
                      .kind = CollisionKind::kfp,
                      .alpha = 1.0,
                      .initial_temperature = 3.0};
    SolverConfig config;
    config.n_v = 512;
    const double vmax = config.resolved_v_max(model);
    VelocityGrid g0 = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 3.0); }, vmax, config.n_v);
    g0.normalize();
    const HomogeneousResult run =
        solve_homogeneous(config, model, g0, uniform_checkpoints(8.0, 16));
    const VelocityGrid target = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 2.0); }, vmax, config.n_v);
    double prev = relative_entropy(g0, target);
    bool monotone = true;
    for (const auto& snap : run.snapshots) {
        const double h = relative_entropy(snap, target);
        if (h > prev + 1e-12) monotone = false;
        prev = h;
    }
    c.require(monotone, "relative entropy increased between checkpoints");
    c.note("H falls from " + fmt(relative_entropy(g0, target)) + " to " + fmt(prev));
    return c;
}

}  // namespace

std::vector<CriterionResult> run_all(std::ostream& out) {
    struct Entry {
        int id;
        const char* name;
        std::function<Check()> body;
    };
    const std::vector<Entry> entries = {
        {1, "temperature-law", criterion_temperature_law},
        {2, "ness-stationarity", criterion_ness_stationarity},
        {3, "mixing-identities", criterion_mixing_identities},
        {4, "homogeneous-convergence", criterion_homogeneous_convergence},
        {5, "bgk-ness", criterion_bgk_ness},
        {6, "transition-exactness", criterion_transition_exactness},
        {7, "asymptotic-bounds", criterion_asymptotic_bounds},
        {8, "event-probability", criterion_event_probability},
        {9, "doeblin-machinery", criterion_doeblin_machinery},
        {10, "spatial-flattening", criterion_spatial_flattening},
        {11, "entropy-diagnostic", criterion_entropy_diagnostic},
    };

    std::vector<CriterionResult> results;
    for (const auto& entry : entries) {
        CriterionResult res;
        res.id = entry.id;
        res.name = entry.name;
        const auto start = std::chrono::steady_clock::now();
        try {
            const Check c = entry.body();
            res.pass = c.pass;
            res.detail = c.detail.str();
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("exception: ") + e.what();
        }
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char line[512];
        std::snprintf(line, sizeof(line), "[%2d/11] %-4s %-24s (%6.1f s)  %s", res.id,
                      res.pass ? "PASS" : "FAIL", res.name.c_str(), res.seconds,
                      res.detail.c_str());
        out << line << std::endl;
        results.push_back(std::move(res));
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

}  // namespace nessim::acceptance
