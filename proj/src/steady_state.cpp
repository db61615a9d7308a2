#include "nessim/steady_state.hpp"

#include <cmath>

#include "nessim/quadrature.hpp"

namespace nessim {

MixingMeasure MixingMeasure::from(const ReservoirSet& reservoirs) {
    if (reservoirs.size() != 2)
        throw UnsupportedClosedForm(
            "mixing measure closed form requires exactly two reservoirs; "
            "use the grid solver steady state for k != 2");
    MixingMeasure m;
    m.t1_ = reservoirs[0].temperature;
    m.t2_ = reservoirs[1].temperature;
    if (m.t1_ >= m.t2_)
        throw std::invalid_argument("MixingMeasure: reservoir temperatures must be distinct");
    m.eta1_ = reservoirs[0].rate;
    m.eta2_ = reservoirs[1].rate;
    m.eta_ = reservoirs.eta();
    m.t_inf_ = reservoirs.t_inf();
    m.exponent_ = 0.5 * m.eta_ - 1.0;
    m.c1_ = m.eta1_ / (2.0 * std::pow(m.t_inf_ - m.t1_, 0.5 * m.eta_));
    m.c2_ = m.eta2_ / (2.0 * std::pow(m.t2_ - m.t_inf_, 0.5 * m.eta_));
    return m;
}

double MixingMeasure::density(double temperature) const {
    if (temperature < t1_ || temperature > t2_) return 0.0;
    if (temperature == t_inf_) return 0.0;
    if (temperature < t_inf_) return c1_ * std::pow(t_inf_ - temperature, exponent_);
    return c2_ * std::pow(temperature - t_inf_, exponent_);
}

double MixingMeasure::cdf(double temperature) const {
    if (temperature <= t1_) return 0.0;
    if (temperature >= t2_) return 1.0;
    const double p1 = eta1_ / eta_;
    if (temperature < t_inf_)
        return p1 * (1.0 - std::pow((t_inf_ - temperature) / (t_inf_ - t1_), 0.5 * eta_));
    return p1 + (eta2_ / eta_) * std::pow((temperature - t_inf_) / (t2_ - t_inf_), 0.5 * eta_);
}

double MixingMeasure::sample(RandomStream& rng) const {
    const double u = rng.uniform_pos();
    const double branch = rng.uniform();
    const double stretch = std::pow(u, 2.0 / eta_);
    if (branch < eta1_ / eta_) return t_inf_ - (t_inf_ - t1_) * stretch;
    return t_inf_ + (t2_ - t_inf_) * stretch;
}

double MixingMeasure::integrate_against(const std::function<double(double)>& phi, double tol_abs,
                                        double tol_rel) const {
    // Each half carries mass eta_j/eta. For eta < 2 substitute
    // T = T_inf -/+ s^{2/eta}: w(T) dT becomes a constant density in s.
    double total = 0.0;
    const double half_tol_abs = 0.5 * tol_abs;
    if (eta_ < 2.0) {
        const double power = 2.0 / eta_;
        auto half = [&](double delta, double weight, double sign) {
            const double s_max = std::pow(delta, 0.5 * eta_);
            const double scale = weight / (eta_ * s_max);  // c_j * (2/eta)
            return integrate_de_or_throw(
                [&](double s) { return scale * phi(t_inf_ + sign * std::pow(s, power)); }, 0.0,
                s_max, half_tol_abs, tol_rel);
        };
        total += half(t_inf_ - t1_, eta1_, -1.0);
        total += half(t2_ - t_inf_, eta2_, +1.0);
    } else {
        total += integrate_de_or_throw([&](double T) { return density(T) * phi(T); }, t1_,
                                       t_inf_, half_tol_abs, tol_rel);
        total += integrate_de_or_throw([&](double T) { return density(T) * phi(T); }, t_inf_,
                                       t2_, half_tol_abs, tol_rel);
    }
    return total;
}

double fp_mixing_density(double temperature, const ReservoirSet& reservoirs) {
    return MixingMeasure::from(reservoirs).density(temperature);
}

double fp_mixing_cdf(double temperature, const ReservoirSet& reservoirs) {
    return MixingMeasure::from(reservoirs).cdf(temperature);
}

double fp_mixing_sample(RandomStream& rng, const ReservoirSet& reservoirs) {
    return MixingMeasure::from(reservoirs).sample(rng);
}

double fp_ness_density(std::span<const double> v, const ReservoirSet& reservoirs, double tol_abs,
                       double tol_rel) {
    const MixingMeasure w = MixingMeasure::from(reservoirs);
    return w.integrate_against([&](double T) { return maxwellian_density(v, T); }, tol_abs,
                               tol_rel);
}

double fp_ness_cdf(double v, const ReservoirSet& reservoirs) {
    const MixingMeasure w = MixingMeasure::from(reservoirs);
    return w.integrate_against([&](double T) { return maxwellian_cdf(v, T); }, 1e-13, 1e-11);
}

double bgk_ness_density(std::span<const double> v, const ReservoirSet& reservoirs, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("bgk_ness_density: alpha must be positive");
    double acc = alpha * maxwellian_density(v, reservoirs.t_inf());
    for (const auto& r : reservoirs) acc += r.rate * maxwellian_density(v, r.temperature);
    return acc / (alpha + reservoirs.eta());
}

double bgk_ness_cdf(double v, const ReservoirSet& reservoirs, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("bgk_ness_cdf: alpha must be positive");
    double acc = alpha * maxwellian_cdf(v, reservoirs.t_inf());
    for (const auto& r : reservoirs) acc += r.rate * maxwellian_cdf(v, r.temperature);
    return acc / (alpha + reservoirs.eta());
}

double pure_reservoir_ness(std::span<const double> v, const ReservoirSet& reservoirs) {
    double acc = 0.0;
    for (const auto& r : reservoirs) acc += r.rate * maxwellian_density(v, r.temperature);
    return acc / reservoirs.eta();
}

double pure_reservoir_cdf(double v, const ReservoirSet& reservoirs) {
    double acc = 0.0;
    for (const auto& r : reservoirs) acc += r.rate * maxwellian_cdf(v, r.temperature);
    return acc / reservoirs.eta();
}

double stationarity_residual(const VelocityGrid& density, const ReservoirSet& reservoirs,
                             CollisionKind kind, double alpha) {
    const int n = density.size();
    const double boundary = std::max(std::abs(density[0]), std::abs(density[n - 1]));
    if (boundary > 1e-12)
        throw std::invalid_argument(
            "stationarity_residual: boundary density above 1e-12; grid too short");

    std::vector<double> rate(static_cast<std::size_t>(n), 0.0);
    if (kind == CollisionKind::kfp) {
        FokkerPlanckOperator op(density.v_max(), n);
        op.prepare(reservoirs.t_inf());
        op.apply(density.values(), rate);
    } else {
        if (alpha <= 0.0) throw std::invalid_argument("stationarity_residual: alpha must be positive");
        for (int i = 0; i < n; ++i)
            rate[i] += alpha * (maxwellian_density(density.node(i), reservoirs.t_inf()) - density[i]);
    }
    for (const auto& r : reservoirs)
        for (int i = 0; i < n; ++i)
            rate[i] += r.rate * (maxwellian_density(density.node(i), r.temperature) - density[i]);

    double l1 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        l1 += w * std::abs(rate[i]);
    }
    return l1 * density.spacing();
}

}  // namespace nessim
