#include "nessim/model.hpp"

#include <algorithm>

namespace nessim {

ReservoirSet::ReservoirSet(std::vector<Reservoir> reservoirs) : items_(std::move(reservoirs)) {
    if (items_.empty()) throw std::invalid_argument("ReservoirSet: at least one reservoir required");
    for (const auto& r : items_) {
        if (r.rate <= 0.0) throw std::invalid_argument("ReservoirSet: rates must be positive");
        if (r.temperature <= 0.0)
            throw std::invalid_argument("ReservoirSet: temperatures must be positive");
    }
    std::stable_sort(items_.begin(), items_.end(),
                     [](const Reservoir& a, const Reservoir& b) { return a.temperature < b.temperature; });
    eta_ = 0.0;
    double weighted = 0.0;
    for (const auto& r : items_) {
        eta_ += r.rate;
        weighted += r.rate * r.temperature;
    }
    t_inf_ = weighted / eta_;
}

EquilibriumParameters equilibrium_parameters(const ReservoirSet& reservoirs) {
    return {reservoirs.eta(), reservoirs.t_inf()};
}

double maxwellian_density(std::span<const double> v, double temperature) {
    if (temperature <= 0.0) throw std::invalid_argument("maxwellian_density: T must be positive");
    double sq = 0.0;
    for (double c : v) sq += c * c;
    const auto d = static_cast<double>(v.size());
    return std::pow(2.0 * M_PI * temperature, -0.5 * d) * std::exp(-sq / (2.0 * temperature));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double maxwellian_cdf(double v, double temperature) {
    if (temperature <= 0.0) throw std::invalid_argument("maxwellian_cdf: T must be positive");
    return normal_cdf(v / std::sqrt(temperature));
}

}  // namespace nessim
