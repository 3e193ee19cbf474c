#pragma once
// Pairwise distance and path-weight functions between feature vectors.

#include <span>

namespace sgs {

// Per-direction weight scales: alpha for rows, beta for columns.
struct Scale {
    double alpha = 1.0;
    double beta = 1.0;
};

double euclid_distance(std::span<const double> a, std::span<const double> b);

// exp(-d / scale); 1 iff d == 0.
double edge_weight(double d, double scale);

// Product of per-edge weights along a path = exp(-sum(ds) / scale).
// Empty path (u == v) gives 1.
double path_weight(std::span<const double> ds, double scale);

} // namespace sgs
