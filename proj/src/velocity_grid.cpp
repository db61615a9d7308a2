#include "nessim/velocity_grid.hpp"

namespace nessim {

FokkerPlanckOperator::FokkerPlanckOperator(double v_max, int n)
    : v_max_(v_max), n_(n), dv_(2.0 * v_max / (n - 1)) {
    if (n < 3) throw std::invalid_argument("FokkerPlanckOperator: need at least 3 nodes");
    v_half_.resize(n_ - 1);
    delta_.resize(n_ - 1);
    flux_.resize(n_ - 1);
    for (int i = 0; i < n_ - 1; ++i) v_half_[i] = -v_max_ + (i + 0.5) * dv_;
}

void FokkerPlanckOperator::prepare(double temperature) {
    if (temperature <= 0.0)
        throw std::invalid_argument("FokkerPlanckOperator: temperature must be positive");
    temperature_ = temperature;
    for (int i = 0; i < n_ - 1; ++i) {
        const double w = v_half_[i] * dv_ / temperature;
        // delta = 1 - (1/w - 1/(e^w - 1)): zero flux on the sampled
        // exp(-v^2/2T), whose node ratio is exactly e^{-w}
        delta_[i] =
            (std::abs(w) < 1e-8) ? 0.5 + w / 12.0 : 1.0 - (1.0 / w - 1.0 / std::expm1(w));
    }
}

void FokkerPlanckOperator::apply(std::span<const double> in, std::span<double> out,
                                 double scale) const {
    if (temperature_ <= 0.0)
        throw std::logic_error("FokkerPlanckOperator: prepare() not called");
    if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_)
        throw std::invalid_argument("FokkerPlanckOperator: size mismatch");
    const double inv_dv = 1.0 / dv_;
    for (int i = 0; i < n_ - 1; ++i) {
        // flux J = T dg/dv + v g at the cell edge
        flux_[i] = temperature_ * (in[i + 1] - in[i]) * inv_dv +
                   v_half_[i] * (delta_[i] * in[i + 1] + (1.0 - delta_[i]) * in[i]);
    }
    const double s = scale * inv_dv;
    out[0] += s * flux_[0];
    for (int i = 1; i < n_ - 1; ++i) out[i] += s * (flux_[i] - flux_[i - 1]);
    out[n_ - 1] += -s * flux_[n_ - 2];
}

VelocityGrid fp_operator_apply(const VelocityGrid& g, double temperature) {
    FokkerPlanckOperator op(g.v_max(), g.size());
    op.prepare(temperature);
    VelocityGrid out(g.v_max(), g.size());
    op.apply(g.values(), out.values());
    return out;
}

}  // namespace nessim
