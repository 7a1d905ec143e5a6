#include "otproc/transport_map.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "otproc/errors.hpp"
#include "otproc/grid.hpp"
#include "otproc/warnings.hpp"

namespace otproc {

namespace {

void validate_tvals(const std::vector<double>& t) {
    if (t.size() < 2) throw InvalidInputError("TransportMap needs a grid of size >= 2");
    if (t.front() != 0.0 || t.back() != 1.0)
        throw InvalidInputError("TransportMap endpoints must be pinned to 0 and 1");
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (!std::isfinite(t[j]) || t[j] < 0.0 || t[j] > 1.0)
            throw DomainError("TransportMap value outside [0,1] at index " + std::to_string(j));
        if (j > 0 && t[j] < t[j - 1])
            throw InvalidInputError("TransportMap values decrease at index " + std::to_string(j));
    }
}

double golden_section_min_distance(const std::vector<double>& fixed,
                                   const std::vector<double>& line) {
    // Minimizes a |-> integral |fixed(u) - u - a (line(u) - u)| du over [0,1].
    // The objective is convex (L1 norm of an affine family), so golden-section
    // search converges to the global minimum.
    const std::size_t m = fixed.size();
    const auto u = grid::points(m);
    std::vector<double> integrand(m);
    auto objective = [&](double a) {
        for (std::size_t j = 0; j < m; ++j)
            integrand[j] = std::fabs(fixed[j] - u[j] - a * (line[j] - u[j]));
        return grid::trapezoid(integrand);
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    while (hi - lo > 1e-8) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    return std::min({f1, f2, objective(lo), objective(hi)});
}

}  // namespace

TransportMap::TransportMap(std::vector<double> tvals) : tvals_(std::move(tvals)) {
    validate_tvals(tvals_);
}

TransportMap TransportMap::sanitized(std::vector<double> tvals) {
    if (tvals.size() < 2) throw InvalidInputError("TransportMap needs a grid of size >= 2");
    grid::clamp01(tvals);
    tvals.front() = 0.0;
    tvals.back() = 1.0;
    grid::cumulative_max(tvals);
    tvals.back() = 1.0;
    return TransportMap(std::move(tvals));
}

TransportMap TransportMap::identity(std::size_t grid_size) {
    return TransportMap(grid::points(grid_size));
}

double TransportMap::operator()(double u) const { return grid::interp(tvals_, u); }

TransportMap optimal_transport(const GridMeasure& from, const GridMeasure& to) {
    if (from.grid_size() != to.grid_size())
        throw IncompatibleGridError("optimal_transport: mismatched grid sizes");
    const std::size_t m = from.grid_size();
    for (std::size_t j = 1; j < m; ++j) {
        if (from.qvals()[j] == from.qvals()[j - 1]) {
            warn("optimal_transport: source quantile function has a flat plateau; "
                 "using the generalized inverse");
            break;
        }
    }
    std::vector<double> t(m);
    for (std::size_t j = 0; j < m; ++j)
        t[j] = to.quantile(from.cdf(grid::point(j, m)));
    return TransportMap::sanitized(std::move(t));
}

GridMeasure push_forward(const TransportMap& map, const GridMeasure& base) {
    if (map.grid_size() != base.grid_size())
        throw IncompatibleGridError("push_forward: mismatched grid sizes");
    std::vector<double> q(base.grid_size());
    for (std::size_t j = 0; j < q.size(); ++j) q[j] = map(base.qvals()[j]);
    return GridMeasure::sanitized(std::move(q));
}

TransportMap measure_to_transport(const GridMeasure& mu) {
    return TransportMap::sanitized(mu.qvals());
}

GridMeasure transport_to_measure(const TransportMap& map) {
    // T#Unif has quantile function T o id = T.
    return GridMeasure(map.tvals());
}

TransportMap scalar_mult(double alpha, const TransportMap& map) {
    if (std::fabs(alpha) > 1.0)
        throw InvalidParameterError("scalar_mult: alpha must lie in [-1,1]");
    const std::size_t m = map.grid_size();
    if (alpha == 0.0) return TransportMap::identity(m);
    if (alpha == 1.0) return map;
    if (alpha == -1.0) return invert(map);
    std::vector<double> v(m);
    if (alpha > 0.0) {
        for (std::size_t j = 0; j < m; ++j) {
            double u = grid::point(j, m);
            v[j] = u + alpha * (map.tvals()[j] - u);
        }
    } else {
        TransportMap inv = invert(map);
        for (std::size_t j = 0; j < m; ++j) {
            double u = grid::point(j, m);
            v[j] = u + alpha * (u - inv.tvals()[j]);
        }
    }
    return TransportMap::sanitized(std::move(v));
}

TransportMap invert(const TransportMap& map) {
    const std::size_t m = map.grid_size();
    std::vector<double> v(m);
    for (std::size_t j = 0; j < m; ++j)
        v[j] = grid::generalized_inverse_at(map.tvals(), grid::point(j, m));
    return TransportMap::sanitized(std::move(v));
}

int transport_sign(const TransportMap& map) {
    const std::size_t m = map.grid_size();
    std::vector<double> integrand(m);
    for (std::size_t j = 0; j < m; ++j) integrand[j] = map.tvals()[j] - grid::point(j, m);
    double s = grid::trapezoid(integrand);
    if (s > 0.0) return 1;
    if (s < 0.0) return -1;
    return 0;
}

double norm1(const TransportMap& map) {
    const std::size_t m = map.grid_size();
    std::vector<double> integrand(m);
    for (std::size_t j = 0; j < m; ++j)
        integrand[j] = std::fabs(map.tvals()[j] - grid::point(j, m));
    return grid::trapezoid(integrand);
}

double transport_distance(const TransportMap& a, const TransportMap& b, double p) {
    if (a.grid_size() != b.grid_size())
        throw IncompatibleGridError("transport_distance: mismatched grid sizes");
    if (!(p >= 1.0)) throw InvalidParameterError("transport_distance: p must be >= 1");
    const std::size_t m = a.grid_size();
    std::vector<double> integrand(m);
    if (p == 1.0) {
        for (std::size_t j = 0; j < m; ++j) integrand[j] = std::fabs(a.tvals()[j] - b.tvals()[j]);
        return grid::trapezoid(integrand);
    }
    if (p == 2.0) {
        for (std::size_t j = 0; j < m; ++j) {
            double d = a.tvals()[j] - b.tvals()[j];
            integrand[j] = d * d;
        }
        return std::sqrt(grid::trapezoid(integrand));
    }
    for (std::size_t j = 0; j < m; ++j)
        integrand[j] = std::pow(std::fabs(a.tvals()[j] - b.tvals()[j]), p);
    return std::pow(grid::trapezoid(integrand), 1.0 / p);
}

TransportMap geodesic(const TransportMap& map, double s) {
    if (s < 0.0 || s > 1.0) throw InvalidParameterError("geodesic: s must lie in [0,1]");
    return scalar_mult(2.0 * s - 1.0, map);
}

double equiv_class_distance(const TransportMap& query, const TransportMap& representative) {
    if (query.grid_size() != representative.grid_size())
        throw IncompatibleGridError("equiv_class_distance: mismatched grid sizes");
    double forward = golden_section_min_distance(query.tvals(), representative.tvals());
    double backward = golden_section_min_distance(representative.tvals(), query.tvals());
    return std::min(forward, backward);
}

}  // namespace otproc
