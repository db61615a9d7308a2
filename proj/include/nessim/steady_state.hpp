// Closed-form non-equilibrium steady states: the two-reservoir drift-diffusion
// NESS as a Gaussian scale mixture over temperatures, the BGK Maxwellian
// mixture, and the pure-reservoir mixture, plus a grid stationarity residual.
#pragma once

#include <span>
#include <stdexcept>

#include "nessim/model.hpp"
#include "nessim/rng.hpp"
#include "nessim/velocity_grid.hpp"

namespace nessim {

struct UnsupportedClosedForm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mixing density w on [T_1, T_2] for exactly two reservoirs with T_1 < T_2:
//   w(T) = c_1 (T_inf - T)^{eta/2-1} on [T_1, T_inf),
//          c_2 (T - T_inf)^{eta/2-1} on (T_inf, T_2],  w(T_inf) = 0,
// with c_1 = eta_1 / (2 (T_inf-T_1)^{eta/2}), c_2 = eta_2 / (2 (T_2-T_inf)^{eta/2}).
// Integrates to 1 and has mean T_inf for every eta > 0.
//
// TODO: with k > 2 reservoirs the continuous part has no closed form here and
// a point mass appears at T_inf whenever some T_j == T_inf; supporting that
// requires the numerical steady state from the grid solver instead.
class MixingMeasure {
public:
    static MixingMeasure from(const ReservoirSet& reservoirs);

    double t_lo() const { return t1_; }
    double t_hi() const { return t2_; }
    double t_inf() const { return t_inf_; }
    double eta() const { return eta_; }

    double density(double temperature) const;
    double cdf(double temperature) const;

    // Inverse-CDF draw: with probability eta_1/eta return
    // T_inf - (T_inf-T_1) U^{2/eta}, else T_inf + (T_2-T_inf) U^{2/eta}.
    double sample(RandomStream& rng) const;

    // Integral of phi(T) w(T) dT. The substitution T = T_inf -/+ s^{2/eta}
    // removes the endpoint singularity for eta < 2, so the tolerance is
    // uniform in eta.
    double integrate_against(const std::function<double(double)>& phi, double tol_abs = 1e-12,
                             double tol_rel = 1e-10) const;

private:
    MixingMeasure() = default;
    double t1_, t2_, t_inf_, eta_, eta1_, eta2_, c1_, c2_, exponent_;
};

double fp_mixing_density(double temperature, const ReservoirSet& reservoirs);
double fp_mixing_cdf(double temperature, const ReservoirSet& reservoirs);
double fp_mixing_sample(RandomStream& rng, const ReservoirSet& reservoirs);

// Drift-diffusion NESS velocity density g(v) = int w(T) m_T(v) dT and its
// one-dimensional CDF. Throws QuadratureError when the requested tolerance
// is not reached.
double fp_ness_density(std::span<const double> v, const ReservoirSet& reservoirs,
                       double tol_abs = 1e-12, double tol_rel = 1e-10);
inline double fp_ness_density(double v, const ReservoirSet& reservoirs) {
    return fp_ness_density(std::span<const double>(&v, 1), reservoirs);
}
double fp_ness_cdf(double v, const ReservoirSet& reservoirs);

// BGK NESS (alpha + eta)^{-1} (alpha m_{T_inf} + sum_j eta_j m_{T_j}).
double bgk_ness_density(std::span<const double> v, const ReservoirSet& reservoirs, double alpha);
inline double bgk_ness_density(double v, const ReservoirSet& reservoirs, double alpha) {
    return bgk_ness_density(std::span<const double>(&v, 1), reservoirs, alpha);
}
double bgk_ness_cdf(double v, const ReservoirSet& reservoirs, double alpha);

// Steady state with no collision operator: eta^{-1} sum_j eta_j m_{T_j}.
double pure_reservoir_ness(std::span<const double> v, const ReservoirSet& reservoirs);
inline double pure_reservoir_ness(double v, const ReservoirSet& reservoirs) {
    return pure_reservoir_ness(std::span<const double>(&v, 1), reservoirs);
}
double pure_reservoir_cdf(double v, const ReservoirSet& reservoirs);

// L1 norm of the discretized stationary operator applied to a grid density:
// G_{T_inf} g + sum_j eta_j (m_{T_j} - g) for the drift-diffusion kind, or
// alpha (m_{T_inf} - g) + sum_j eta_j (m_{T_j} - g) for BGK. Small for a true
// steady state. Rejects grids whose boundary density exceeds 1e-12.
double stationarity_residual(const VelocityGrid& density, const ReservoirSet& reservoirs,
                             CollisionKind kind, double alpha = 1.0);

}  // namespace nessim
