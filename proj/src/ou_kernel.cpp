#include "nessim/ou_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nessim {

namespace {

// (e^z - 1)/z with the removable singularity filled in.
double expm1_over(double z) {
    if (std::abs(z) < 1e-10) return 1.0 + 0.5 * z + z * z / 6.0;
    return std::expm1(z) / z;
}

// 4(e^{-u} - 1 + u) - (e^{-2u} - 1 + 2u) = sum_{n>=3} (-1)^n (4 - 2^n) u^n / n!,
// the stationary position-variance shape; series below u = 0.5 to dodge the
// O(u^3) cancellation.
double var_x_shape(double u) {
    if (u < 0.5) {
        double term = u * u * u / 6.0;  // n = 3 contribution carries (4-8)(-1)^3 = 4
        double acc = 0.0;
        double sign = -1.0;
        double pow2 = 8.0;
        for (int n = 3; n <= 30; ++n) {
            acc += sign * (4.0 - pow2) * term;
            if (std::abs((4.0 - pow2) * term) < 1e-18 * std::abs(acc)) break;
            term *= u / (n + 1);
            sign = -sign;
            pow2 *= 2.0;
        }
        return acc;
    }
    return 4.0 * (std::expm1(-u) + u) - (std::expm1(-2.0 * u) + 2.0 * u);
}

}  // namespace

OUMoments ou_moments(double s, double u, double a, double b,
                     const TemperatureSchedule& schedule) {
    if (u <= 0.0) throw std::invalid_argument("ou_moments: elapsed time must be positive");
    const double t_inf = schedule.t_inf;
    const double eta = schedule.eta;
    const double transient = schedule.t0 - t_inf;  // T(r) = T_inf + transient e^{-eta r}

    OUMoments m;
    m.s = s;
    m.u = u;
    m.a = a;
    m.b = b;
    m.schedule = schedule;

    const double decay = std::exp(-u);
    const double grow1 = -std::expm1(-u);  // 1 - e^{-u}
    m.mean_v = decay * b;
    m.mean_x = a + grow1 * b;

    // I_p = int_s^{s+u} e^{p(r-t)} e^{-eta r} dr = u e^{-eta s} e^{-p u} h((p-eta) u)
    const double pref = u * std::exp(-eta * s);
    const double i0 = pref * expm1_over(-eta * u);
    const double i1 = pref * decay * expm1_over((1.0 - eta) * u);
    const double i2 = pref * decay * decay * expm1_over((2.0 - eta) * u);

    m.var_v = -std::expm1(-2.0 * u) * t_inf + 2.0 * transient * i2;
    m.var_x = var_x_shape(u) * t_inf + 2.0 * transient * (i0 - 2.0 * i1 + i2);
    m.cov = t_inf * grow1 * grow1 + 2.0 * transient * (i1 - i2);

    if (!(m.var_v > 0.0) || !(m.var_x > 0.0))
        throw std::domain_error("ou_moments: schedule produced nonpositive variance");
    m.rho = m.cov / std::sqrt(m.var_v * m.var_x);
    return m;
}

double ou_marginal_v_density(double v, const OUMoments& m) {
    const double z = v - m.mean_v;
    return std::exp(-0.5 * z * z / m.var_v) / std::sqrt(2.0 * M_PI * m.var_v);
}

double ou_conditional_density(double x, double v, const OUMoments& m) {
    const double var = m.conditional_var_x();
    const double z = x - m.conditional_mean_x(v);
    return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * M_PI * var);
}

double ou_joint_density(double x, double v, const OUMoments& m) {
    return ou_conditional_density(x, v, m) * ou_marginal_v_density(v, m);
}

namespace {

template <typename Density>
double wrap_sum(double x, double center, double side_length, Density&& density) {
    // start at the nearest periodic image and expand outward
    const long k0 = std::lround((center - x) / side_length);
    double total = density(x + static_cast<double>(k0) * side_length);
    for (long step = 1; step < 1000000; ++step) {
        const double up = density(x + static_cast<double>(k0 + step) * side_length);
        const double down = density(x + static_cast<double>(k0 - step) * side_length);
        total += up + down;
        if (up + down < 1e-16 * total) break;
    }
    return total;
}

}  // namespace

double wrapped_conditional_density(double x, double v, const OUMoments& m, double side_length) {
    return wrap_sum(x, m.conditional_mean_x(v), side_length,
                    [&](double xi) { return ou_conditional_density(xi, v, m); });
}

double wrapped_joint_density(double x, double v, const OUMoments& m, double side_length) {
    return wrap_sum(x, m.conditional_mean_x(v), side_length,
                    [&](double xi) { return ou_joint_density(xi, v, m); });
}

PhasePoint sample_ou_step(RandomStream& rng, double s, double u, const PhasePoint& start,
                          const TemperatureSchedule& schedule, double side_length) {
    const std::size_t d = start.v.size();
    PhasePoint out;
    out.x.resize(d);
    out.v.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
        const OUMoments m = ou_moments(s, u, start.x[c], start.v[c], schedule);
        auto [z1, z2] = rng.normal_pair();
        const double v = m.mean_v + std::sqrt(m.var_v) * z1;
        const double x = m.conditional_mean_x(v) + std::sqrt(m.conditional_var_x()) * z2;
        out.v[c] = v;
        out.x[c] = wrap_position(x, side_length);
    }
    return out;
}

double stationary_var_v(double u, double t_inf) { return -std::expm1(-2.0 * u) * t_inf; }

double stationary_var_x(double u, double t_inf) { return var_x_shape(u) * t_inf; }

double stationary_rho(double u) {
    const double num = std::expm1(-u);  // (1-e^{-u})^2 = num^2
    return num * num / std::sqrt(-std::expm1(-2.0 * u) * var_x_shape(u));
}

AsymptoticBoundsReport asymptotic_bounds_check(std::span<const double> u_grid, double t_inf) {
    AsymptoticBoundsReport rep;
    if (u_grid.empty()) throw std::invalid_argument("asymptotic_bounds_check: empty grid");
    std::vector<double> us(u_grid.begin(), u_grid.end());
    std::sort(us.begin(), us.end());
    if (us.front() <= 0.0)
        throw std::invalid_argument("asymptotic_bounds_check: grid must be positive");

    const double upper_c = 0.5 * std::sqrt(15.0);
    const double lower_c = 1.0 / std::sqrt(2.0);
    rep.envelope_ok = true;
    rep.rho_monotone_ok = true;
    rep.var_x_window_ok = true;

    double prev_prod = std::numeric_limits<double>::infinity();
    double prev_shape = 0.0;
    for (double u : us) {
        const double rho = stationary_rho(u);
        const double env = 1.0 / std::sqrt(5.0 + u);
        if (!(rho <= upper_c * env && rho >= lower_c * env)) {
            rep.envelope_ok = false;
            rep.violations.push_back("correlation envelope violated at u=" + std::to_string(u));
        }
        const double prod = rho * std::sqrt(1.0 + u / 5.0);
        if (!(prod <= prev_prod * (1.0 + 1e-12))) {
            rep.rho_monotone_ok = false;
            rep.violations.push_back("rho*sqrt(1+u/5) not decreasing at u=" + std::to_string(u));
        }
        prev_prod = prod;

        const double shape =
            stationary_var_x(u, t_inf) * (1.0 + 2.0 * u) * (1.0 + 2.0 * u) / (u * u * u);
        if (!(shape <= 8.0 * t_inf * (1.0 + 1e-12) &&
              shape >= (2.0 / 3.0) * t_inf * (1.0 - 1e-12))) {
            rep.var_x_window_ok = false;
            rep.violations.push_back("var_x window violated at u=" + std::to_string(u));
        }
        if (!(shape >= prev_shape * (1.0 - 1e-12))) {
            rep.var_x_window_ok = false;
            rep.violations.push_back("var_x shape not increasing at u=" + std::to_string(u));
        }
        prev_shape = shape;
    }

    // limits: rho sqrt(1+u/5) -> 1/sqrt(10) at the top of the grid,
    // rho -> sqrt(3)/2 at small u
    const double tail = stationary_rho(us.back()) * std::sqrt(1.0 + us.back() / 5.0);
    if (us.back() >= 100.0 && std::abs(tail - 1.0 / std::sqrt(10.0)) > 1e-2) {
        rep.rho_monotone_ok = false;
        rep.violations.push_back("large-u limit of rho*sqrt(1+u/5) missed");
    }
    rep.small_u_ok = std::abs(stationary_rho(1e-6) - 0.5 * std::sqrt(3.0)) <= 1e-3;
    if (!rep.small_u_ok) rep.violations.push_back("rho(0+) != sqrt(3)/2");
    return rep;
}

double doeblin_pointwise_bound(const OUMoments& m, double side_length) {
    const double var = m.conditional_var_x();
    const double L = side_length;
    return L * std::exp(-L * L / (8.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

double doeblin_lower_bound(const TemperatureSchedule& schedule, double side_length, double s) {
    const double eta = schedule.eta;
    if (eta <= 0.0) throw std::invalid_argument("doeblin_lower_bound: eta must be positive");
    const int n_grid = 129;
    double cmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_grid; ++i) {
        const double u = (1.0 + static_cast<double>(i) / (n_grid - 1)) / eta;
        const OUMoments m = ou_moments(s, u, 0.0, 0.0, schedule);
        cmin = std::min(cmin, doeblin_pointwise_bound(m, side_length));
    }
    return std::min(cmin, 1.0);
}

double stationary_start_time(const TemperatureSchedule& schedule, double tol) {
    const double eta = schedule.eta;
    const double t_inf = schedule.t_inf;
    const double transient = std::abs(schedule.t0 - t_inf);
    if (transient == 0.0) return 0.0;
    // K: worst transient-to-stationary ratio at s = 0 with unit transient
    // amplitude, over u in [1/eta, 2/eta] and the three second-order moments.
    double K = 0.0;
    const int n_grid = 65;
    for (int i = 0; i < n_grid; ++i) {
        const double u = (1.0 + static_cast<double>(i) / (n_grid - 1)) / eta;
        const double pref = u;  // e^{-eta s} = 1 at s = 0
        const double decay = std::exp(-u);
        auto h = [](double z) {
            return std::abs(z) < 1e-10 ? 1.0 + 0.5 * z : std::expm1(z) / z;
        };
        const double i0 = pref * h(-eta * u);
        const double i1 = pref * decay * h((1.0 - eta) * u);
        const double i2 = pref * decay * decay * h((2.0 - eta) * u);
        K = std::max(K, 2.0 * std::abs(i2) / stationary_var_v(u, 1.0));
        K = std::max(K, 2.0 * std::abs(i0 - 2.0 * i1 + i2) / stationary_var_x(u, 1.0));
        const double e1 = -std::expm1(-u);
        K = std::max(K, 2.0 * std::abs(i1 - i2) / (e1 * e1));
    }
    const double arg = K * transient / (tol * t_inf);
    return std::max(0.0, std::log(arg) / eta);
}

}  // namespace nessim
