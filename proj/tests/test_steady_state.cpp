#include <cmath>

#include "doctest.h"
#include "nessim/diagnostics.hpp"
#include "nessim/quadrature.hpp"
#include "nessim/steady_state.hpp"

using namespace nessim;

namespace {

const ReservoirSet kSymmetric({{1.0, 1.0}, {1.0, 3.0}});

}  // namespace

TEST_CASE("mixing density: flat case and support") {
    // eta = 2 makes the exponent vanish: w = 1/2 on [1,3]
    for (double T : {1.0, 1.4, 1.999, 2.001, 2.7, 3.0})
        CHECK(fp_mixing_density(T, kSymmetric) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(fp_mixing_density(2.0, kSymmetric) == 0.0);  // value at T_inf is 0 by convention
    CHECK(fp_mixing_density(0.9, kSymmetric) == 0.0);
    CHECK(fp_mixing_density(3.1, kSymmetric) == 0.0);
}

TEST_CASE("mixing density: unit mass for a range of total rates") {
    for (double eta : {0.5, 1.0, 2.0, 4.0}) {
        const ReservoirSet rs({{0.5 * eta, 1.0}, {0.5 * eta, 3.0}});
        const MixingMeasure w = MixingMeasure::from(rs);
        const double mass = w.integrate_against([](double) { return 1.0; });
        CHECK(std::abs(mass - 1.0) < 1e-10);
    }
}

TEST_CASE("mixing density: mean equals the equilibrium temperature") {
    const ReservoirSet rs({{1.0, 1.0}, {3.0, 2.0}});
    const MixingMeasure w = MixingMeasure::from(rs);
    const double mean = w.integrate_against([](double T) { return T; });
    CHECK(std::abs(mean - rs.t_inf()) < 1e-10);

    // independent adaptive-quadrature oracle (eta = 4: no endpoint singularity)
    const double oracle =
        integrate_or_throw([&](double T) { return T * w.density(T); }, 1.0, rs.t_inf(), 1e-13,
                           1e-12) +
        integrate_or_throw([&](double T) { return T * w.density(T); }, rs.t_inf(), 2.0, 1e-13,
                           1e-12);
    CHECK(mean == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("mixing density: random parameters keep mass 1 and mean T_inf") {
    RandomStream rng(2024);
    for (int rep = 0; rep < 40; ++rep) {
        const double t1 = 0.5 + 3.0 * rng.uniform();
        const double t2 = t1 + 0.3 + 4.0 * rng.uniform();
        const ReservoirSet rs({{0.1 + 9.9 * rng.uniform(), t1}, {0.1 + 9.9 * rng.uniform(), t2}});
        const MixingMeasure w = MixingMeasure::from(rs);
        CHECK(std::abs(w.integrate_against([](double) { return 1.0; }) - 1.0) < 1e-10);
        CHECK(std::abs(w.integrate_against([](double T) { return T; }) - rs.t_inf()) < 1e-9);
        // density nonnegative on its support
        for (int i = 0; i <= 20; ++i)
            CHECK(w.density(t1 + (t2 - t1) * i / 20.0) >= 0.0);
    }
}

TEST_CASE("mixing sampler matches the closed-form CDF") {
    const MixingMeasure w = MixingMeasure::from(kSymmetric);
    RandomStream rng(99);
    std::vector<double> samples(200000);
    for (double& s : samples) s = w.sample(rng);
    const KsResult ks = ks_statistic(samples, [&](double T) { return w.cdf(T); });
    CHECK(ks.pass_99);
}

TEST_CASE("mixing measure concentrates at the reservoirs as the rate grows") {
    const double p1 = 0.3;
    const double eta = 2000.0;
    const ReservoirSet rs({{p1 * eta, 1.0}, {(1.0 - p1) * eta, 3.0}});
    const MixingMeasure w = MixingMeasure::from(rs);
    RandomStream rng(7);
    const int n = 100000;
    int near_t1 = 0;
    for (int i = 0; i < n; ++i)
        if (w.sample(rng) < 1.0 + 0.01) ++near_t1;
    const double freq = static_cast<double>(near_t1) / n;
    const double se = std::sqrt(p1 * (1.0 - p1) / n);
    CHECK(std::abs(freq - p1) < 3.0 * se + 1e-4);
}

TEST_CASE("mixing measure collapses to T_inf as the rate vanishes") {
    const ReservoirSet rs({{5e-4, 1.0}, {5e-4, 3.0}});
    const MixingMeasure w = MixingMeasure::from(rs);
    RandomStream rng(8);
    const int n = 100000;
    int close = 0;
    for (int i = 0; i < n; ++i)
        if (std::abs(w.sample(rng) - rs.t_inf()) < 0.01 * 2.0) ++close;
    CHECK(static_cast<double>(close) / n > 0.99);
}

TEST_CASE("mixing closed form needs exactly two distinct reservoirs") {
    CHECK_THROWS_AS(MixingMeasure::from(ReservoirSet({{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}})),
                    UnsupportedClosedForm);
    CHECK_THROWS_AS(MixingMeasure::from(ReservoirSet({{1.0, 2.0}})), UnsupportedClosedForm);
    CHECK_THROWS_AS(MixingMeasure::from(ReservoirSet({{1.0, 2.0}, {1.0, 2.0}})),
                    std::invalid_argument);
}

TEST_CASE("scale-mixture steady state: symmetry, mass, second moment") {
    for (double v : {0.1, 0.7, 1.9, 4.2})
        CHECK(fp_ness_density(v, kSymmetric) ==
              doctest::Approx(fp_ness_density(-v, kSymmetric)).epsilon(1e-14));

    const double vmax = 12.0 * std::sqrt(3.0);
    const double mass = integrate_or_throw(
        [&](double v) { return fp_ness_density(v, kSymmetric); }, -vmax, vmax, 1e-10, 1e-9, 256);
    CHECK(std::abs(mass - 1.0) < 1e-8);

    const double m2 = integrate_or_throw(
        [&](double v) { return v * v * fp_ness_density(v, kSymmetric); }, -vmax, vmax, 1e-10,
        1e-9, 256);
    CHECK(std::abs(m2 - 2.0) < 1e-8);
}

TEST_CASE("scale-mixture steady state handles singular mixing densities") {
    // eta = 1 < 2: integrable singularity at T_inf
    const ReservoirSet rs({{0.25, 1.0}, {0.75, 3.0}});
    const double vmax = 12.0 * std::sqrt(3.0);
    const double mass = integrate_or_throw([&](double v) { return fp_ness_density(v, rs); },
                                           -vmax, vmax, 1e-10, 1e-9, 256);
    CHECK(std::abs(mass - 1.0) < 1e-8);
    const double m2 = integrate_or_throw([&](double v) { return v * v * fp_ness_density(v, rs); },
                                         -vmax, vmax, 1e-10, 1e-9, 256);
    CHECK(std::abs(m2 - rs.t_inf()) < 1e-8);
    // CDF consistent with the density route
    const double cdf_mid = fp_ness_cdf(0.8, rs);
    const double from_density = integrate_or_throw(
        [&](double v) { return fp_ness_density(v, rs); }, -vmax, 0.8, 1e-10, 1e-9, 256);
    CHECK(cdf_mid == doctest::Approx(from_density).epsilon(1e-7));
}

TEST_CASE("relaxation-mixture steady state") {
    // single reservoir: every mixture component is the same Maxwellian
    const ReservoirSet single({{2.0, 1.7}});
    for (double alpha : {0.3, 1.0, 5.0})
        for (double v : {0.0, 0.9, 2.4})
            CHECK(bgk_ness_density(v, single, alpha) ==
                  doctest::Approx(maxwellian_density(v, 1.7)).epsilon(1e-13));

    // alpha = 1, unit rates: (m_2 + m_1 + m_3)/3
    for (double v : {0.0, 0.4, 1.3, 3.0}) {
        const double expected = (maxwellian_density(v, 2.0) + maxwellian_density(v, 1.0) +
                                 maxwellian_density(v, 3.0)) /
                                3.0;
        CHECK(bgk_ness_density(v, kSymmetric, 1.0) == doctest::Approx(expected).epsilon(1e-13));
    }

    const ReservoirSet rs({{2.0, 1.0}, {5.0, 4.0}});
    const double vmax = 12.0 * std::sqrt(4.0);
    const double mass = integrate_or_throw(
        [&](double v) { return bgk_ness_density(v, rs, 0.7); }, -vmax, vmax, 1e-13, 1e-12);
    CHECK(std::abs(mass - 1.0) < 1e-12);

    CHECK_THROWS_AS(bgk_ness_density(0.0, rs, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bgk_ness_density(0.0, rs, -1.0), std::invalid_argument);
}

TEST_CASE("mixtures stay between their extreme components") {
    RandomStream rng(5);
    const ReservoirSet rs({{0.8, 1.2}, {1.7, 2.9}});
    for (int rep = 0; rep < 100; ++rep) {
        const double v = (rng.uniform() - 0.5) * 10.0;
        const double lo = std::min({maxwellian_density(v, 1.2), maxwellian_density(v, 2.9),
                                    maxwellian_density(v, rs.t_inf())});
        const double hi = std::max({maxwellian_density(v, 1.2), maxwellian_density(v, 2.9),
                                    maxwellian_density(v, rs.t_inf())});
        const double bgk = bgk_ness_density(v, rs, 1.3);
        const double pure = pure_reservoir_ness(v, rs);
        CHECK(bgk >= lo - 1e-15);
        CHECK(bgk <= hi + 1e-15);
        CHECK(pure >= lo - 1e-15);
        CHECK(pure <= hi + 1e-15);
    }
}

TEST_CASE("pure reservoir mixture") {
    const ReservoirSet single({{3.0, 2.2}});
    for (double v : {0.0, 1.1})
        CHECK(pure_reservoir_ness(v, single) ==
              doctest::Approx(maxwellian_density(v, 2.2)).epsilon(1e-14));

    for (double v : {0.0, 0.5, 2.0}) {
        const double expected =
            0.5 * (maxwellian_density(v, 1.0) + maxwellian_density(v, 3.0));
        CHECK(pure_reservoir_ness(v, kSymmetric) == doctest::Approx(expected).epsilon(1e-14));
    }

    const double vmax = 12.0 * std::sqrt(3.0);
    const double m2 = integrate_or_throw(
        [&](double v) { return v * v * pure_reservoir_ness(v, kSymmetric); }, -vmax, vmax, 1e-13,
        1e-12);
    CHECK(std::abs(m2 - kSymmetric.t_inf()) < 1e-10);
}

TEST_CASE("stationarity residual of the closed forms") {
    const double vmax = 10.0 * std::sqrt(3.0);
    auto sampled_ness = [&](int n) {
        return VelocityGrid::sample([&](double v) { return fp_ness_density(v, kSymmetric); },
                                    vmax, n);
    };
    const double r2048 = stationarity_residual(sampled_ness(2048), kSymmetric,
                                               CollisionKind::kfp);
    const double r4096 = stationarity_residual(sampled_ness(4096), kSymmetric,
                                               CollisionKind::kfp);
    CHECK(r2048 < 1e-4);
    CHECK(r2048 / r4096 == doctest::Approx(4.0).epsilon(0.2));  // second-order decay

    const VelocityGrid bgk = VelocityGrid::sample(
        [&](double v) { return bgk_ness_density(v, kSymmetric, 1.0); }, vmax, 2048);
    CHECK(stationarity_residual(bgk, kSymmetric, CollisionKind::bgk, 1.0) < 1e-6);

    // the equilibrium Maxwellian is *not* stationary with two temperatures
    const VelocityGrid equil = VelocityGrid::sample(
        [&](double v) { return maxwellian_density(v, 2.0); }, vmax, 2048);
    CHECK(stationarity_residual(equil, kSymmetric, CollisionKind::kfp) > 0.01);

    // grids whose boundary carries mass are rejected
    const VelocityGrid narrow = VelocityGrid::sample(
        [&](double v) { return fp_ness_density(v, kSymmetric); }, 2.0, 128);
    CHECK_THROWS_AS(stationarity_residual(narrow, kSymmetric, CollisionKind::kfp),
                    std::invalid_argument);
}
