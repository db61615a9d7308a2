// Gauss-Legendre / Gauss-Hermite rules and a panel-doubling adaptive integrator.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nessim {

struct GaussRule {
    std::vector<double> nodes;    // on [-1,1] (Legendre) or the Hermite abscissae
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1,1]; cached per n.
const GaussRule& gauss_legendre(int n);

// n-point Gauss-Hermite rule for weight exp(-x^2); cached per n.
const GaussRule& gauss_hermite(int n);

struct IntegralResult {
    double value = 0.0;
    double error = 0.0;   // |I_{2m} - I_m| of the last refinement
    bool converged = false;
    int panels = 0;
};

struct QuadratureError : std::runtime_error {
    double achieved;
    explicit QuadratureError(double achieved_tol)
        : std::runtime_error("quadrature did not converge; achieved tolerance " +
                             std::to_string(achieved_tol)),
          achieved(achieved_tol) {}
};

// Composite 16-point Gauss-Legendre over [a,b] with m panels.
template <typename F>
double composite_gl(F&& f, double a, double b, int panels) {
    const GaussRule& rule = gauss_legendre(16);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        total += 0.5 * h * acc;
    }
    return total;
}

// Panel-doubling composite Gauss-Legendre until successive values agree.
template <typename F>
IntegralResult integrate(F&& f, double a, double b, double tol_abs = 1e-12,
                         double tol_rel = 1e-10, int max_panels = 4096) {
    IntegralResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    double prev = composite_gl(f, a, b, 1);
    for (int panels = 2; panels <= max_panels; panels *= 2) {
        const double cur = composite_gl(f, a, b, panels);
        const double err = std::abs(cur - prev);
        res.value = cur;
        res.error = err;
        res.panels = panels;
        if (err <= tol_abs + tol_rel * std::abs(cur)) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    return res;
}

template <typename F>
double integrate_or_throw(F&& f, double a, double b, double tol_abs = 1e-12,
                          double tol_rel = 1e-10, int max_panels = 4096) {
    IntegralResult r = integrate(f, a, b, tol_abs, tol_rel, max_panels);
    if (!r.converged) throw QuadratureError(r.error);
    return r.value;
}

// Double-exponential (tanh-sinh) rule: exponentially convergent even with
// integrable algebraic singularities at either endpoint. The integrand is
// called with points strictly inside (a,b); distances from the endpoints are
// formed directly so no evaluation lands on a singular endpoint.
template <typename F>
IntegralResult integrate_de(F&& f, double a, double b, double tol_abs = 1e-12,
                            double tol_rel = 1e-10) {
    IntegralResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    const double r = 0.5 * (b - a);
    const double t_max = 6.2;

    auto node_sum = [&](double h, bool odd_only) {
        double acc = 0.0;
        const int k_start = odd_only ? 1 : 0;
        const int k_step = odd_only ? 2 : 1;
        for (int k = k_start;; k += k_step) {
            const double t = k * h;
            if (t > t_max) break;
            const double y = 0.5 * M_PI * std::sinh(t);
            const double e2y = std::exp(-2.0 * y);
            const double sech2 = 4.0 * e2y / ((1.0 + e2y) * (1.0 + e2y));
            const double w = r * 0.5 * M_PI * std::cosh(t) * sech2;
            if (w == 0.0) break;
            const double delta = r * 2.0 * e2y / (1.0 + e2y);  // distance from endpoint
            double term = 0.0;
            if (k == 0) {
                term = w * f(a + r);
            } else {
                const double hi = b - delta;
                const double lo = a + delta;
                if (hi < b) term += w * f(hi);
                if (lo > a) term += w * f(lo);
            }
            acc += term;
            if (t > 3.0 && std::abs(term) < 1e-18 * std::abs(acc)) break;
        }
        return acc;
    };

    double h = 0.5;
    double total = node_sum(h, false);
    double prev = h * total;
    for (int level = 1; level <= 10; ++level) {
        h *= 0.5;
        total += node_sum(h, true);
        const double cur = h * total;
        res.value = cur;
        res.error = std::abs(cur - prev);
        res.panels = level;
        if (level >= 2 && res.error <= tol_abs + tol_rel * std::abs(cur)) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    return res;
}

template <typename F>
double integrate_de_or_throw(F&& f, double a, double b, double tol_abs = 1e-12,
                             double tol_rel = 1e-10) {
    IntegralResult r = integrate_de(f, a, b, tol_abs, tol_rel);
    if (!r.converged) throw QuadratureError(r.error);
    return r.value;
}

}  // namespace nessim
