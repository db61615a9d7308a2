#include "nessim/quadrature.hpp"

#include <map>
#include <mutex>

namespace nessim {

namespace {

// Newton iteration on the Legendre polynomial, nodes symmetric about 0.
GaussRule make_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Hermite polynomials for weight exp(-x^2), normalized recurrence.
GaussRule make_hermite(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int m = (n + 1) / 2;
    double x = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            x -= 1.14 * std::pow(n, 0.426) / x;
        else if (i == 2)
            x = 1.86 * x - 0.86 * rule.nodes[n - 1];
        else if (i == 3)
            x = 1.91 * x - 0.91 * rule.nodes[n - 2];
        else
            x = 2.0 * x - rule.nodes[n + 1 - i];
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = pim4, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = x * std::sqrt(2.0 / (j + 1.0)) * p1 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p2;
            }
            pp = std::sqrt(2.0 * n) * p1;
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

std::map<int, GaussRule>& cache(bool hermite) {
    static std::map<int, GaussRule> legendre_cache;
    static std::map<int, GaussRule> hermite_cache;
    return hermite ? hermite_cache : legendre_cache;
}

std::mutex cache_mutex;

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& c = cache(false);
    auto it = c.find(n);
    if (it == c.end()) it = c.emplace(n, make_legendre(n)).first;
    return it->second;
}

const GaussRule& gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& c = cache(true);
    auto it = c.find(n);
    if (it == c.end()) it = c.emplace(n, make_hermite(n)).first;
    return it->second;
}

}  // namespace nessim
