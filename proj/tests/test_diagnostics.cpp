#include <cmath>
#include <vector>

#include "doctest.h"
#include "nessim/diagnostics.hpp"
#include "nessim/model.hpp"
#include "nessim/quadrature.hpp"
#include "nessim/steady_state.hpp"

using namespace nessim;

namespace {

// analytic TV between two centered Maxwellians from the density crossings:
// they cross at v* with v*^2 = 2 ln(sqrt(T2/T1)) / (1/T1 - 1/T2)
double analytic_tv_maxwellians(double t1, double t2) {
    const double vstar = std::sqrt(std::log(t2 / t1) / (1.0 / t1 - 1.0 / t2));
    return std::erf(vstar / std::sqrt(2.0 * t1)) - std::erf(vstar / std::sqrt(2.0 * t2));
}

// exhaustive two-state Doeblin coefficient: supremum over all four events
double two_state_rho_exhaustive(const FiniteKernel& k) {
    double worst = 0.0;
    for (int mask = 0; mask < 4; ++mask) {
        double pa = 0.0, pb = 0.0;
        for (int j = 0; j < 2; ++j)
            if (mask & (1 << j)) {
                pa += k(0, j);
                pb += k(1, j);
            }
        worst = std::max(worst, std::abs(pa - pb));
    }
    return worst;
}

}  // namespace

TEST_CASE("histogram bookkeeping") {
    Histogram h = Histogram::uniform(0.0, 1.0, 4);
    h.add(0.1);
    h.add(0.1);
    h.add(0.95);
    h.add(-3.0);
    h.add(2.0);
    CHECK(h.count(0) == 2.0);
    CHECK(h.count(3) == 1.0);
    CHECK(h.underflow() == 1.0);
    CHECK(h.overflow() == 1.0);
    CHECK(h.total() == 5.0);
    CHECK_THROWS_AS(Histogram::uniform(1.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("l1 distance: identical, analytic pair, and extremes") {
    const double vmax = 10.0 * std::sqrt(3.0);
    const VelocityGrid m1 = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 1.0); }, vmax, 131073);
    const VelocityGrid m3 = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 3.0); }, vmax, 131073);
    CHECK(l1_distance(m1, m1) == 0.0);

    // split at the density crossings so each piece is smooth
    const double vstar = std::sqrt(std::log(3.0) / (1.0 - 1.0 / 3.0));
    auto diff = [](double v) {
        return std::abs(maxwellian_density(v, 1.0) - maxwellian_density(v, 3.0));
    };
    const double oracle = integrate_or_throw(diff, -vmax, -vstar, 1e-13, 1e-12) +
                          integrate_or_throw(diff, -vstar, vstar, 1e-13, 1e-12) +
                          integrate_or_throw(diff, vstar, vmax, 1e-13, 1e-12);
    CHECK(l1_distance(m1, m3) == doctest::Approx(oracle).epsilon(1e-8));

    // disjoint indicators: TV extremal case
    VelocityGrid a(1.0, 201), b(1.0, 201);
    for (int i = 0; i < 90; ++i) a[i] = 1.0;
    for (int i = 111; i < 201; ++i) b[i] = 1.0;
    a.normalize();
    b.normalize();
    CHECK(l1_distance(a, b) == doctest::Approx(2.0).epsilon(1e-12));

    const VelocityGrid other(2.0, 201);
    CHECK_THROWS_AS(l1_distance(a, other), std::invalid_argument);
}

TEST_CASE("histogram TV: identical samples and null calibration") {
    RandomStream rng(404);
    Histogram a = Histogram::uniform(-6.0, 6.0, 32);
    Histogram b = Histogram::uniform(-6.0, 6.0, 32);
    for (int i = 0; i < 20000; ++i) {
        const double x = rng.normal();
        a.add(x);
        b.add(x);
    }
    RandomStream boot(1);
    const TvResult same = tv_histogram(a, b, boot);
    CHECK(same.tv == 0.0);

    // independent draws from one law: the debiased statistic sits inside noise
    Histogram c = Histogram::uniform(-6.0, 6.0, 32);
    Histogram d = Histogram::uniform(-6.0, 6.0, 32);
    for (int i = 0; i < 100000; ++i) c.add(rng.normal());
    for (int i = 0; i < 100000; ++i) d.add(rng.normal());
    const TvResult null = tv_histogram(c, d, boot);
    CHECK(std::abs(null.tv - null.null_bias) < 3.0 * null.se);

    Histogram wrong = Histogram::uniform(-5.0, 6.0, 32);
    CHECK_THROWS_AS(tv_histogram(a, wrong, boot), std::invalid_argument);
}

TEST_CASE("histogram TV matches the analytic crossing-point value") {
    RandomStream rng(808);
    Histogram a = Histogram::uniform(-12.0, 12.0, 48);
    Histogram b = Histogram::uniform(-12.0, 12.0, 48);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        a.add(rng.normal());                    // T = 1
        b.add(std::sqrt(3.0) * rng.normal());   // T = 3
    }
    RandomStream boot(2);
    const TvResult tv = tv_histogram(a, b, boot);
    const double analytic = analytic_tv_maxwellians(1.0, 3.0);
    CHECK(std::abs(tv.tv - analytic) < 3.0 * tv.se + 0.003);
}

TEST_CASE("TV is bounded by half the L1 distance of the densities") {
    // binned TV of exact bin masses can only lose mass differences
    const double vmax = 8.0;
    Histogram ha = Histogram::uniform(-vmax, vmax, 24);
    Histogram hb = Histogram::uniform(-vmax, vmax, 24);
    for (int i = 0; i < 24; ++i) {
        const double lo = -vmax + 2.0 * vmax * i / 24, hi = lo + 2.0 * vmax / 24;
        ha.add(0.5 * (lo + hi),
               integrate_or_throw([](double v) { return maxwellian_density(v, 1.0); }, lo, hi));
        hb.add(0.5 * (lo + hi),
               integrate_or_throw([](double v) { return maxwellian_density(v, 3.0); }, lo, hi));
    }
    RandomStream boot(3);
    // large equal masses: bootstrap SE irrelevant here, compare the plug-in value
    const double tv_binned = tv_histogram(ha, hb, boot, 10).tv;
    const double vstar = std::sqrt(std::log(3.0) / (1.0 - 1.0 / 3.0));
    auto diff = [](double v) {
        return std::abs(maxwellian_density(v, 1.0) - maxwellian_density(v, 3.0));
    };
    const double half_l1 = 0.5 * (integrate_or_throw(diff, -vmax, -vstar, 1e-13, 1e-12) +
                                  integrate_or_throw(diff, -vstar, vstar, 1e-13, 1e-12) +
                                  integrate_or_throw(diff, vstar, vmax, 1e-13, 1e-12));
    CHECK(tv_binned <= half_l1 + 1e-9);
    CHECK(tv_binned == doctest::Approx(half_l1).epsilon(0.02));
}

TEST_CASE("KS statistic: calibration, power, and monotonicity guard") {
    RandomStream rng(777);
    int passes = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<double> xs(400);
        for (double& x : xs) x = rng.normal();
        if (ks_statistic(xs, [](double v) { return normal_cdf(v); }).pass_99) ++passes;
    }
    CHECK(passes >= 190);  // ~99% pass rate

    std::vector<double> t1(10000);
    for (double& x : t1) x = rng.normal();
    CHECK_FALSE(ks_statistic(t1, [](double v) { return maxwellian_cdf(v, 3.0); }).pass_99);

    CHECK_THROWS_AS(ks_statistic(t1, [](double v) { return -v; }), std::invalid_argument);
    std::vector<double> tiny(10, 0.0);
    CHECK_THROWS_AS(ks_statistic(tiny, [](double v) { return normal_cdf(v); }),
                    std::invalid_argument);
}

TEST_CASE("two-sample KS distinguishes laws") {
    RandomStream rng(999);
    std::vector<double> a(20000), b(20000), c(20000);
    for (double& x : a) x = rng.normal();
    for (double& x : b) x = rng.normal();
    for (double& x : c) x = 1.2 * rng.normal();
    CHECK(ks_two_sample(a, b).pass_99);
    CHECK_FALSE(ks_two_sample(a, c).pass_99);
}

TEST_CASE("relative entropy: closed form, support, Pinsker") {
    const double vmax = 14.0;
    const VelocityGrid m1 = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 1.0); }, vmax, 4096);
    const VelocityGrid m3 = VelocityGrid::sample(
        [](double v) { return maxwellian_density(v, 3.0); }, vmax, 4096);
    CHECK(relative_entropy(m1, m1) == doctest::Approx(0.0).epsilon(1e-12));

    // centered Gaussian KL: (1/2)(T1/T2 - 1 + ln(T2/T1))
    const double closed = 0.5 * (1.0 / 3.0 - 1.0 + std::log(3.0));
    CHECK(closed == doctest::Approx(0.2159).epsilon(1e-3));
    CHECK(relative_entropy(m1, m3) == doctest::Approx(closed).epsilon(1e-6));
    // quadrature route agrees
    const double quad = integrate_or_throw(
        [](double v) {
            const double f = maxwellian_density(v, 1.0), g = maxwellian_density(v, 3.0);
            return f * std::log(f / g);
        },
        -vmax, vmax, 1e-12, 1e-11);
    CHECK(relative_entropy(m1, m3) == doctest::Approx(quad).epsilon(1e-8));

    // support violation yields the infinity marker, not a throw
    VelocityGrid g0(vmax, 4096);
    CHECK(std::isinf(relative_entropy(m1, g0)));

    // Pinsker-flavored bound on an analytic pair
    const double l1 = l1_distance(m1, m3);
    CHECK(relative_entropy(m1, m3) >= 0.25 * l1 * l1);
    CHECK(relative_entropy(m3, m1) >= -1e-10);  // nonnegativity
}

TEST_CASE("finite kernels: coefficient extremes and composition") {
    const FiniteKernel id = FiniteKernel::identity(4);
    CHECK(id.doeblin_coefficient() == doctest::Approx(1.0));

    // identical rows: one-step total coupling
    std::vector<double> flat(16, 0.25);
    const FiniteKernel coupled(4, flat);
    CHECK(coupled.doeblin_coefficient() == doctest::Approx(0.0));
    RandomStream rng(31);
    const FiniteKernel any = FiniteKernel::random(4, rng);
    CHECK(coupled.compose(any).doeblin_coefficient() == doctest::Approx(0.0));
    CHECK(any.compose(coupled).doeblin_coefficient() == doctest::Approx(0.0));

    // identity composed with itself: equality case
    std::vector<FiniteKernel> ids = {id, id};
    const SubmultReport eq = doeblin_submultiplicativity_check(ids);
    CHECK(eq.ok);
    CHECK(eq.max_excess <= 0.0 + 1e-15);

    CHECK_THROWS_AS(FiniteKernel(2, {0.5, 0.6, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteKernel(2, {1.5, -0.5, 0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("submultiplicativity holds on random five-state kernels") {
    RandomStream rng(4242);
    std::vector<FiniteKernel> kernels;
    for (int i = 0; i < 201; ++i) kernels.push_back(FiniteKernel::random(5, rng));
    const SubmultReport rep = doeblin_submultiplicativity_check(kernels);
    CHECK(rep.pairs_checked >= 200);
    CHECK(rep.ok);
    CHECK(rep.max_excess <= 1e-12);
}

TEST_CASE("two-state kernels on a lattice agree with the exhaustive coefficient") {
    for (int pi = 0; pi <= 20; ++pi)
        for (int qi = 0; qi <= 20; ++qi) {
            const double p = pi * 0.05, q = qi * 0.05;
            const FiniteKernel k(2, {p, 1.0 - p, q, 1.0 - q});
            CHECK(k.doeblin_coefficient() ==
                  doctest::Approx(two_state_rho_exhaustive(k)).epsilon(1e-12));
            // and submultiplicativity against a fixed partner exactly
            const FiniteKernel partner(2, {0.3, 0.7, 0.85, 0.15});
            const double lhs = k.compose(partner).doeblin_coefficient();
            CHECK(lhs <= k.doeblin_coefficient() * partner.doeblin_coefficient() + 1e-12);
        }
}

TEST_CASE("hydrodynamic fields recover known moments") {
    const double L = 2.0, vmax = 12.0;
    const PhaseGrid uniform = PhaseGrid::sample(
        [&](double, double v) { return maxwellian_density(v, 1.5) / L; }, L, 16, vmax, 1024);
    const HydroFields hf = hydrodynamic_moments(uniform);
    for (int ix = 0; ix < 16; ++ix) {
        CHECK(hf.rho[ix] == doctest::Approx(1.0 / L).epsilon(1e-10));
        CHECK(std::abs(hf.u[ix]) < 1e-12);
        CHECK(hf.temperature[ix] == doctest::Approx(1.5).epsilon(1e-9));
    }

    // shifted Maxwellian with x-dependent density
    const double u0 = 0.8, T0 = 2.2;
    const PhaseGrid shifted = PhaseGrid::sample(
        [&](double x, double v) {
            const double rho = (1.0 + 0.3 * std::cos(2.0 * M_PI * x / L)) / L;
            return rho * maxwellian_density(v - u0, T0);
        },
        L, 16, vmax, 1024);
    const HydroFields hs = hydrodynamic_moments(shifted);
    for (int ix = 0; ix < 16; ++ix) {
        const double rho = (1.0 + 0.3 * std::cos(2.0 * M_PI * hs.x[ix] / L)) / L;
        CHECK(hs.rho[ix] == doctest::Approx(rho).epsilon(1e-9));
        CHECK(hs.u[ix] == doctest::Approx(u0).epsilon(1e-9));
        CHECK(hs.temperature[ix] == doctest::Approx(T0).epsilon(1e-8));
    }
}

TEST_CASE("chi-square machinery") {
    // known quantile: P(chi2_1 > 3.841) ~ 0.05
    CHECK(chi_square_pvalue(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(chi_square_pvalue(92.01, 63) == doctest::Approx(0.01).epsilon(0.05));

    RandomStream rng(2);
    std::vector<double> counts(64, 0.0);
    for (int i = 0; i < 64000; ++i) counts[rng.next_u64() & 63] += 1.0;
    const ChiSquareResult res = chi_square_uniform(counts);
    CHECK(res.dof == 63);
    CHECK(res.p_value > 0.01);
}
