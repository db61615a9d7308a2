// Exact Gaussian transition law of the degenerate diffusion
//   dv = -v dt + sqrt(2 T(t)) dw,   dx = v dt
// under an exponentially relaxing temperature schedule: second-order moments,
// joint / conditional / marginal densities, torus wrapping, exact sampling,
// stationary-limit envelopes and the coupling lower-bound constant.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "nessim/model.hpp"
#include "nessim/rng.hpp"

namespace nessim {

// Transition moments of (x_{s+u}, v_{s+u}) given (x_s, v_s) = (a, b).
// All five second-order quantities are evaluated from the elementary
// integrals I_p = int_s^{s+u} e^{p(r-t)} e^{-eta r} dr written with
// (e^z - 1)/z, which keeps the formulas finite and accurate through the
// removable singularities at eta = 1 and eta = 2.
struct OUMoments {
    double mean_x = 0.0;
    double mean_v = 0.0;
    double var_x = 0.0;
    double var_v = 0.0;
    double cov = 0.0;
    double rho = 0.0;

    // provenance
    double s = 0.0;
    double u = 0.0;
    double a = 0.0;
    double b = 0.0;
    TemperatureSchedule schedule{1.0, 1.0, 1.0};

    double conditional_mean_x(double v) const { return mean_x + cov / var_v * (v - mean_v); }
    double conditional_var_x() const { return (1.0 - rho * rho) * var_x; }
};

OUMoments ou_moments(double s, double u, double a, double b, const TemperatureSchedule& schedule);

// Gaussian marginal of v_{s+u}.
double ou_marginal_v_density(double v, const OUMoments& m);
// Conditional density of x_{s+u} given v_{s+u} = v, on the real line.
double ou_conditional_density(double x, double v, const OUMoments& m);
// Joint density on R^2; equals conditional * marginal.
double ou_joint_density(double x, double v, const OUMoments& m);

// Torus versions: sum over periodic images x + kL, truncated symmetrically
// once a term falls below 1e-16 of the running sum.
double wrapped_conditional_density(double x, double v, const OUMoments& m, double side_length);
double wrapped_joint_density(double x, double v, const OUMoments& m, double side_length);

// Exact bivariate draw of (x_{s+u}, v_{s+u}); coordinates independent in d > 1.
// Positions are wrapped into [-L/2, L/2).
PhasePoint sample_ou_step(RandomStream& rng, double s, double u, const PhasePoint& start,
                          const TemperatureSchedule& schedule, double side_length);

// Stationary-limit (transient-free) quantities: variances at temperature
// T_inf and the correlation, which is temperature-independent.
double stationary_var_v(double u, double t_inf);
double stationary_var_x(double u, double t_inf);
double stationary_rho(double u);

struct AsymptoticBoundsReport {
    bool envelope_ok = false;     // sqrt(15)/2 (5+u)^{-1/2} >= rho >= 2^{-1/2} (5+u)^{-1/2}
    bool rho_monotone_ok = false; // rho(u) sqrt(1+u/5) decreasing, limit 10^{-1/2}
    bool var_x_window_ok = false; // 8 T >= var_x (1+2u)^2/u^3 >= (2/3) T, increasing
    bool small_u_ok = false;      // rho(0+) = sqrt(3)/2
    std::vector<std::string> violations;
    bool all_ok() const {
        return envelope_ok && rho_monotone_ok && var_x_window_ok && small_u_ok;
    }
};

AsymptoticBoundsReport asymptotic_bounds_check(std::span<const double> u_grid,
                                               double t_inf = 1.0);

// Pointwise coupling weight L * (sigma_x sqrt(2 pi (1-rho^2)))^{-1}
//   * exp(-L^2 / (8 (1-rho^2) sigma_x^2)):
// L times the retained-image lower bound on the wrapped conditional density.
double doeblin_pointwise_bound(const OUMoments& m, double side_length);

// Coupling constant C in (0,1]: the pointwise bound minimized over
// u in [1/eta, 2/eta], evaluated at start time s (expected >= the burn-in
// time below so transients are negligible). wrapped conditional density
// >= C / L holds for every (x, v, a, b).
double doeblin_lower_bound(const TemperatureSchedule& schedule, double side_length, double s);

// Smallest s_0 = max(0, ln(K |T0 - T_inf| / (tol T_inf)) / eta) such that for
// s >= s_0 the transient parts of the transition moments are below tol
// relative to their stationary values over u in [1/eta, 2/eta]; K is computed
// from the transient coefficients.
double stationary_start_time(const TemperatureSchedule& schedule, double tol = 1e-6);

}  // namespace nessim
