// Tensor grid over the periodic box times velocity space, row-major with the
// velocity index fastest so per-position columns are contiguous.
#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace nessim {

class PhaseGrid {
public:
    PhaseGrid(double side_length, int n_x, double v_max, int n_v)
        : side_length_(side_length), n_x_(n_x), v_max_(v_max), n_v_(n_v),
          values_(static_cast<std::size_t>(n_x) * n_v, 0.0) {
        if (n_x < 2 || n_v < 3) throw std::invalid_argument("PhaseGrid: grid too small");
        if (side_length <= 0.0 || v_max <= 0.0)
            throw std::invalid_argument("PhaseGrid: nonpositive extent");
    }

    static PhaseGrid sample(const std::function<double(double, double)>& f, double side_length,
                            int n_x, double v_max, int n_v) {
        PhaseGrid g(side_length, n_x, v_max, n_v);
        for (int ix = 0; ix < n_x; ++ix)
            for (int iv = 0; iv < n_v; ++iv)
                g.at(ix, iv) = f(g.x_node(ix), g.v_node(iv));
        return g;
    }

    int n_x() const { return n_x_; }
    int n_v() const { return n_v_; }
    double side_length() const { return side_length_; }
    double v_max() const { return v_max_; }
    double dx() const { return side_length_ / n_x_; }
    double dv() const { return 2.0 * v_max_ / (n_v_ - 1); }
    // periodic nodes, no duplicated endpoint
    double x_node(int ix) const { return -0.5 * side_length_ + ix * dx(); }
    double v_node(int iv) const { return -v_max_ + iv * dv(); }

    double& at(int ix, int iv) { return values_[static_cast<std::size_t>(ix) * n_v_ + iv]; }
    double at(int ix, int iv) const { return values_[static_cast<std::size_t>(ix) * n_v_ + iv]; }
    std::span<double> column(int ix) { return {values_.data() + static_cast<std::size_t>(ix) * n_v_, static_cast<std::size_t>(n_v_)}; }
    std::span<const double> column(int ix) const { return {values_.data() + static_cast<std::size_t>(ix) * n_v_, static_cast<std::size_t>(n_v_)}; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double v_weight(int iv) const { return (iv == 0 || iv == n_v_ - 1) ? 0.5 * dv() : dv(); }

    double mass() const {
        double acc = 0.0;
        for (int ix = 0; ix < n_x_; ++ix)
            for (int iv = 0; iv < n_v_; ++iv) acc += v_weight(iv) * at(ix, iv);
        return acc * dx();
    }

    double kinetic_temperature() const {
        double acc = 0.0;
        for (int ix = 0; ix < n_x_; ++ix)
            for (int iv = 0; iv < n_v_; ++iv) {
                const double v = v_node(iv);
                acc += v_weight(iv) * v * v * at(ix, iv);
            }
        return acc * dx();  // unit total mass assumed
    }

    void normalize() {
        const double m = mass();
        if (m <= 0.0) throw std::runtime_error("PhaseGrid::normalize: nonpositive mass");
        for (double& x : values_) x /= m;
    }

    bool same_layout(const PhaseGrid& o) const {
        return n_x_ == o.n_x_ && n_v_ == o.n_v_ && side_length_ == o.side_length_ &&
               v_max_ == o.v_max_;
    }

private:
    double side_length_;
    int n_x_;
    double v_max_;
    int n_v_;
    std::vector<double> values_;
};

}  // namespace nessim
