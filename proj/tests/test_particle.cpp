#include <cmath>
#include <vector>

#include "doctest.h"
#include "nessim/particle.hpp"
#include "nessim/pde.hpp"
#include "nessim/quadrature.hpp"
#include "nessim/steady_state.hpp"

using namespace nessim;

namespace {

const ReservoirSet kSymmetric({{1.0, 1.0}, {1.0, 3.0}});

ModelConfig kfp_model() {
    return {.domain = {1, 1.0},
            .reservoirs = kSymmetric,
            .kind = CollisionKind::kfp,
            .alpha = 1.0,
            .initial_temperature = 3.0};
}

std::vector<double> velocities(const Ensemble& e) { return e.v; }

}  // namespace

TEST_CASE("ensemble initialization draws from the initial Maxwellian") {
    const Ensemble e = Ensemble::initial(kfp_model(), 50000, 42);
    CHECK(e.size() == 50000);
    CHECK(std::abs(e.kinetic_temperature() - 3.0) < 4.0 * 3.0 * std::sqrt(2.0 / 50000.0));
    CHECK(std::abs(e.mean_velocity()[0]) < 4.0 * std::sqrt(3.0 / 50000.0));
    for (double x : e.x) {
        CHECK(x >= -0.5);
        CHECK(x < 0.5);
    }
    CHECK_THROWS_AS(Ensemble::initial(kfp_model(), 0, 1), std::invalid_argument);
}

TEST_CASE("temperature relaxation law holds along the jump-diffusion run") {
    const ModelConfig model = kfp_model();
    Ensemble e = Ensemble::initial(model, 40000, 7);
    const SimRecord rec = simulate_kfp(e, 4.0, 10);
    const double se = std::sqrt(2.0 / static_cast<double>(e.size()));
    for (const auto& ck : rec.checkpoints) {
        CHECK(std::abs(ck.temperature - ck.schedule_temperature) <
              3.0 * ck.schedule_temperature * se);
        // zero-momentum initial data keeps zero mean velocity
        CHECK(std::abs(ck.mean_velocity[0]) <
              4.0 * std::sqrt(ck.schedule_temperature / static_cast<double>(e.size())));
    }
}

TEST_CASE("reservoir selection frequencies follow the rates") {
    ModelConfig model = kfp_model();
    model.reservoirs = ReservoirSet({{0.5, 1.0}, {1.2, 2.0}, {0.3, 3.0}});
    Ensemble e = Ensemble::initial(model, 30000, 11);
    const SimRecord rec = simulate_kfp(e, 3.0, 3);
    std::uint64_t total = 0;
    for (auto c : rec.reservoir_counts) total += c;
    CHECK(total > 100000);
    double chi2 = 0.0;
    for (std::size_t j = 0; j < rec.reservoir_counts.size(); ++j) {
        const double expected =
            static_cast<double>(total) * model.reservoirs[j].rate / model.reservoirs.eta();
        const double diff = static_cast<double>(rec.reservoir_counts[j]) - expected;
        chi2 += diff * diff / expected;
    }
    CHECK(chi_square_pvalue(chi2, static_cast<int>(rec.reservoir_counts.size()) - 1) > 0.01);
}

TEST_CASE("single reservoir run equilibrates to its Maxwellian") {
    ModelConfig model = kfp_model();
    model.reservoirs = ReservoirSet({{1.0, 2.0}});
    model.initial_temperature = 3.0;
    Ensemble e = Ensemble::initial(model, 20000, 13);
    simulate_kfp(e, 12.0, 4);
    const KsResult ks =
        ks_statistic(velocities(e), [](double v) { return maxwellian_cdf(v, 2.0); });
    CHECK(ks.pass_99);
}

TEST_CASE("long-time velocity marginal is the scale mixture; positions flatten") {
    const ModelConfig model = kfp_model();
    Ensemble e = Ensemble::initial(model, 20000, 17);
    simulate_kfp(e, 15.0, 5);
    const KsResult ks =
        ks_statistic(velocities(e), [&](double v) { return fp_ness_cdf(v, kSymmetric); });
    CHECK(ks.pass_99);

    std::vector<double> counts(64, 0.0);
    for (double x : e.x) {
        const int bin = std::min(63, static_cast<int>((x + 0.5) * 64.0));
        counts[bin] += 1.0;
    }
    CHECK(chi_square_uniform(counts).p_value > 0.01);
}

TEST_CASE("checkpoint refinement does not change the law") {
    const ModelConfig model = kfp_model();
    Ensemble coarse = Ensemble::initial(model, 30000, 23);
    Ensemble fine = Ensemble::initial(model, 30000, 23);
    simulate_kfp(coarse, 2.0, 2);
    simulate_kfp(fine, 2.0, 16);
    CHECK(ks_two_sample(velocities(coarse), velocities(fine)).pass_99);
    CHECK(ks_two_sample(coarse.x, fine.x).pass_99);
}

TEST_CASE("closed-form and self-consistent modes agree") {
    const ModelConfig model = kfp_model();
    Ensemble a = Ensemble::initial(model, 20000, 29);
    Ensemble b = Ensemble::initial(model, 20000, 31);
    const SimRecord ra = simulate_kfp(a, 4.0, 16, KfpMode::closed_form_schedule);
    const SimRecord rb = simulate_kfp(b, 4.0, 16, KfpMode::self_consistent);
    const double se =
        std::sqrt(2.0 / 20000.0) * std::sqrt(2.0);  // two independent estimates
    for (std::size_t i = 0; i < ra.checkpoints.size(); ++i) {
        const double t_ref = ra.checkpoints[i].schedule_temperature;
        CHECK(std::abs(ra.checkpoints[i].temperature - rb.checkpoints[i].temperature) <
              4.0 * t_ref * se);
    }
}

TEST_CASE("BGK run: temperature law and velocity mixture") {
    ModelConfig model = kfp_model();
    model.kind = CollisionKind::bgk;
    model.alpha = 1.0;
    Ensemble e = Ensemble::initial(model, 30000, 37);
    const SimRecord rec = simulate_bgk(e, 12.0, 12);
    const double se = std::sqrt(2.0 / 30000.0);
    for (const auto& ck : rec.checkpoints)
        CHECK(std::abs(ck.temperature - ck.schedule_temperature) <
              3.0 * ck.schedule_temperature * se);
    CHECK(rec.thermostat_count > 0);
    const KsResult ks = ks_statistic(
        velocities(e), [&](double v) { return bgk_ness_cdf(v, kSymmetric, 1.0); });
    CHECK(ks.pass_99);
}

TEST_CASE("BGK with vanishing relaxation reduces to the pure reservoir model") {
    ModelConfig model = kfp_model();
    model.kind = CollisionKind::bgk;
    model.alpha = 0.0;
    Ensemble e = Ensemble::initial(model, 20000, 41);
    const SimRecord rec = simulate_bgk(e, 10.0, 4);
    CHECK(rec.thermostat_count == 0);
    const KsResult ks = ks_statistic(
        velocities(e), [&](double v) { return pure_reservoir_cdf(v, kSymmetric); });
    CHECK(ks.pass_99);
}

TEST_CASE("event frequency equals e^{-2} for any rate") {
    RandomStream rng(53);
    const double p = std::exp(-2.0);
    for (double eta : {0.3, 1.0, 7.0}) {
        const double freq = event_e_frequency(40000, 5.0, eta, rng);
        CHECK(std::abs(freq - p) < 3.0 * std::sqrt(p * (1.0 - p) / 40000.0));
    }
    // quadrature of the first-arrival decomposition gives e^{-2} exactly
    for (double eta : {0.3, 1.0, 7.0}) {
        const double integral = integrate_or_throw(
            [&](double s) { return eta * std::exp(-eta * s) * std::exp(-eta * (2.0 / eta - s)); },
            0.0, 1.0 / eta, 1e-14, 1e-13);
        CHECK(integral == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("coupled clouds from the same point have vanishing TV") {
    const ModelConfig model = kfp_model();
    const PhasePoint z{{0.1}, {0.5}};
    PhasePartition part;
    part.n_x_cells = 8;
    part.n_v_cells = 8;
    const TvSeries series = coupled_tv_experiment(model, z, z, 1.0, 2.0, part, 5000, 61);
    for (std::size_t i = 0; i < series.tv.size(); ++i)
        CHECK(std::abs(series.tv[i] - 0.0) < series.se[i] * 3.0 + 0.05);
}

TEST_CASE("coupled clouds contract in total variation") {
    const ModelConfig model = kfp_model();
    const PhasePoint z0{{-0.4}, {-2.0}};
    const PhasePoint z1{{0.45}, {3.0}};
    PhasePartition part;
    part.n_x_cells = 8;
    part.n_v_cells = 8;
    const TvSeries series = coupled_tv_experiment(model, z0, z1, 1.0, 6.0, part, 20000, 67);
    REQUIRE(series.tv.size() >= 4);
    // decrements beyond joint noise
    for (std::size_t i = 0; i + 1 < series.tv.size(); ++i) {
        const double joint_se = std::sqrt(series.se[i] * series.se[i] +
                                          series.se[i + 1] * series.se[i + 1]);
        CHECK(series.tv[i + 1] <= series.tv[i] + 3.0 * joint_se);
    }
    // one-window contraction against the coupling bound
    const double c = series.doeblin_constant;
    CHECK(c > 0.0);
    CHECK(series.tv.front() <=
          1.0 - std::exp(-2.0) * c * c + 3.0 * series.se.front());
}

TEST_CASE("solver and particle velocity marginals agree at a matched time") {
    const ModelConfig model = kfp_model();
    SolverConfig config;
    config.n_v = 512;
    const double vmax = config.resolved_v_max(model);
    VelocityGrid g0 = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 3.0); }, vmax, config.n_v);
    g0.normalize();
    std::vector<double> ck = {0.75, 1.5};
    const HomogeneousResult run = solve_homogeneous(config, model, g0, ck);

    // cumulative trapezoid CDF of the solver state, linearly interpolated
    const VelocityGrid& g = run.snapshots.back();
    std::vector<double> cdf(static_cast<std::size_t>(g.size()), 0.0);
    for (int i = 1; i < g.size(); ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (g[i] + g[i - 1]) * g.spacing();
    auto solver_cdf = [&](double v) {
        if (v <= -vmax) return 0.0;
        if (v >= vmax) return 1.0;
        const double pos = (v + vmax) / g.spacing();
        const int idx = std::min(g.size() - 2, static_cast<int>(pos));
        const double frac = pos - idx;
        return cdf[idx] * (1.0 - frac) + cdf[idx + 1] * frac;
    };

    Ensemble e = Ensemble::initial(model, 20000, 71);
    simulate_kfp(e, 1.5, 2);
    CHECK(ks_statistic(velocities(e), solver_cdf).pass_99);
}
