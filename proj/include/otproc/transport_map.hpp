#pragma once

#include <cstddef>
#include <vector>

#include "otproc/grid_measure.hpp"

namespace otproc {

// Optimal transport map on [0,1]: non-decreasing, T(0)=0, T(1)=1, sampled on
// the equispaced argument grid u_j = j/(M-1).
class TransportMap {
public:
    // Identity on the minimal two-point grid.
    TransportMap() : tvals_{0.0, 1.0} {}

    // Validates: M >= 2, non-decreasing, entries in [0,1], pinned endpoints.
    explicit TransportMap(std::vector<double> tvals);

    // Clamps, applies a running maximum and pins the endpoints before validating.
    static TransportMap sanitized(std::vector<double> tvals);

    static TransportMap identity(std::size_t grid_size);

    std::size_t grid_size() const noexcept { return tvals_.size(); }
    const std::vector<double>& tvals() const noexcept { return tvals_; }

    // Value at an arbitrary argument (linear interpolation).
    double operator()(double u) const;

private:
    std::vector<double> tvals_;
};

// T = F_to^{-1} o F_from. A flat quantile plateau in `from` triggers a
// degenerate-source warning; the generalized inverse is used throughout.
TransportMap optimal_transport(const GridMeasure& from, const GridMeasure& to);

// Push-forward T#mu via the quantile identity F_{T#mu}^{-1} = T o F_mu^{-1}.
GridMeasure push_forward(const TransportMap& map, const GridMeasure& base);

// Isometry between measures on [0,1] and transports: M(mu) = F_mu^{-1} o F_S
// (endpoints pinned) and M^{-1}(T) = T#Unif.
TransportMap measure_to_transport(const GridMeasure& mu);
GridMeasure transport_to_measure(const TransportMap& map);

// Scalar multiplication in the transport space:
//   alpha in (0,1]:  u + alpha (T(u) - u)
//   alpha = 0:       identity
//   alpha in [-1,0): u + alpha (u - T^{-1}(u))
TransportMap scalar_mult(double alpha, const TransportMap& map);

// Piecewise-linear generalized inverse, left-continuous across flat segments.
TransportMap invert(const TransportMap& map);

// Sign of the net mass displacement: sign of the trapezoid sum of T(u) - u.
int transport_sign(const TransportMap& map);

// Transport norm ||T||_1 = integral of |T(u) - u| (distance to the identity).
double norm1(const TransportMap& map);

double transport_distance(const TransportMap& a, const TransportMap& b, double p);

// Constant-speed geodesic from T^{-1} (s=0) through the identity (s=0.5) to T (s=1).
TransportMap geodesic(const TransportMap& map, double s);

// Distance from `query` to the equivalence class of `representative`:
// min over a in [0,1] of d_{W,1} between one map and the scaled line through
// the other, taken in both directions. Golden-section search per direction.
double equiv_class_distance(const TransportMap& query, const TransportMap& representative);

}  // namespace otproc
