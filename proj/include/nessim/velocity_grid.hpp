// Uniform velocity grids and the conservative drift-diffusion operator
// G_T g = T g'' + (v g)' in Chang-Cooper flux form. The exponential flux
// weighting makes the sampled Maxwellian at temperature T the exact discrete
// kernel, so converged steady states carry no first-order bias.
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace nessim {

class VelocityGrid {
public:
    VelocityGrid(double v_max, int n)
        : v_max_(v_max), n_(n), values_(static_cast<std::size_t>(n), 0.0) {
        if (n < 3) throw std::invalid_argument("VelocityGrid: need at least 3 nodes");
        if (v_max <= 0.0) throw std::invalid_argument("VelocityGrid: v_max must be positive");
    }

    static VelocityGrid sample(const std::function<double(double)>& f, double v_max, int n) {
        VelocityGrid g(v_max, n);
        for (int i = 0; i < n; ++i) g.values_[i] = f(g.node(i));
        return g;
    }

    int size() const { return n_; }
    double v_max() const { return v_max_; }
    double spacing() const { return 2.0 * v_max_ / (n_ - 1); }
    double node(int i) const { return -v_max_ + i * spacing(); }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double& operator[](int i) { return values_[i]; }
    double operator[](int i) const { return values_[i]; }

    // Trapezoidal quadrature of values * f(node).
    double moment(const std::function<double(double)>& f) const {
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double w = (i == 0 || i == n_ - 1) ? 0.5 : 1.0;
            acc += w * values_[i] * f(node(i));
        }
        return acc * spacing();
    }

    double mass() const {
        double acc = 0.5 * (values_.front() + values_.back());
        for (int i = 1; i < n_ - 1; ++i) acc += values_[i];
        return acc * spacing();
    }

    double second_moment() const {
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double w = (i == 0 || i == n_ - 1) ? 0.5 : 1.0;
            const double v = node(i);
            acc += w * v * v * values_[i];
        }
        return acc * spacing();
    }

    void normalize() {
        const double m = mass();
        if (m <= 0.0) throw std::runtime_error("VelocityGrid::normalize: nonpositive mass");
        for (double& x : values_) x /= m;
    }

    bool same_layout(const VelocityGrid& other) const {
        return n_ == other.n_ && v_max_ == other.v_max_;
    }

private:
    double v_max_;
    int n_;
    std::vector<double> values_;
};

// Chang-Cooper weights and flux application for G_T. prepare(T) must be called
// before apply(); the weights depend on T through w = v_{i+1/2} dv / T.
class FokkerPlanckOperator {
public:
    FokkerPlanckOperator(double v_max, int n);

    double v_max() const { return v_max_; }
    int size() const { return n_; }
    double spacing() const { return dv_; }

    void prepare(double temperature);

    // out += scale * G_T(in); zero-flux boundaries, telescoping fluxes.
    void apply(std::span<const double> in, std::span<double> out, double scale = 1.0) const;

private:
    double v_max_;
    int n_;
    double dv_;
    double temperature_ = 0.0;
    std::vector<double> v_half_;   // edge velocities v_{i+1/2}
    std::vector<double> delta_;    // Chang-Cooper weights per edge
    mutable std::vector<double> flux_;
};

// One-shot application of G_T to a grid density (returns the rate of change).
VelocityGrid fp_operator_apply(const VelocityGrid& g, double temperature);

}  // namespace nessim
