#include "sgs/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "sgs/kernels.hpp"

namespace sgs {

double euclid_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("euclid_distance: vectors must have equal nonzero length");
    }
    return std::sqrt(kernels::active().squared_distance(a.data(), b.data(), a.size()));
}

double edge_weight(double d, double scale) {
    if (d < 0.0) throw std::domain_error("edge_weight: distance must be >= 0");
    if (!(scale > 0.0)) throw std::domain_error("edge_weight: scale must be > 0");
    return std::exp(-d / scale);
}

double path_weight(std::span<const double> ds, double scale) {
    if (!(scale > 0.0)) throw std::domain_error("path_weight: scale must be > 0");
    double total = 0.0;
    for (double d : ds) {
        if (d < 0.0) throw std::domain_error("path_weight: distances must be >= 0");
        total += d;
    }
    return std::exp(-total / scale);
}

} // namespace sgs
