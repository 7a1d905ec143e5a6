#include "otproc/grid_measure.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "otproc/errors.hpp"
#include "otproc/grid.hpp"

namespace otproc {

namespace {

void validate_qvals(const std::vector<double>& q) {
    if (q.size() < 2) throw InvalidInputError("GridMeasure needs a grid of size >= 2");
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (!std::isfinite(q[j]) || q[j] < 0.0 || q[j] > 1.0)
            throw DomainError("GridMeasure quantile value outside [0,1] at index " + std::to_string(j));
        if (j > 0 && q[j] < q[j - 1])
            throw InvalidInputError("GridMeasure quantile values decrease at index " + std::to_string(j));
    }
}

}  // namespace

GridMeasure::GridMeasure(std::vector<double> qvals) : qvals_(std::move(qvals)) {
    validate_qvals(qvals_);
}

GridMeasure GridMeasure::sanitized(std::vector<double> qvals) {
    grid::clamp01(qvals);
    grid::cumulative_max(qvals);
    return GridMeasure(std::move(qvals));
}

GridMeasure GridMeasure::uniform(std::size_t grid_size) {
    return GridMeasure(grid::points(grid_size));
}

double GridMeasure::quantile(double level) const { return grid::interp(qvals_, level); }

double GridMeasure::cdf(double x) const { return grid::generalized_inverse_at(qvals_, x); }

GridMeasure empirical_quantile(std::span<const double> samples, std::size_t grid_size) {
    if (samples.empty()) throw InvalidInputError("empirical_quantile: empty sample vector");
    if (grid_size < 2) throw InvalidParameterError("empirical_quantile: grid size must be >= 2");
    for (double x : samples) {
        if (!std::isfinite(x) || x < 0.0 || x > 1.0)
            throw DomainError("empirical_quantile: sample outside [0,1]");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> q(grid_size);
    const std::size_t m = sorted.size();
    if (m == 1) {
        std::fill(q.begin(), q.end(), sorted.front());
    } else {
        for (std::size_t j = 0; j < grid_size; ++j)
            q[j] = grid::interp(sorted, grid::point(j, grid_size));
    }
    return GridMeasure(std::move(q));
}

double wasserstein_distance(const GridMeasure& a, const GridMeasure& b, double p) {
    if (a.grid_size() != b.grid_size())
        throw IncompatibleGridError("wasserstein_distance: mismatched grid sizes");
    if (!(p >= 1.0)) throw InvalidParameterError("wasserstein_distance: p must be >= 1");

    const std::size_t m = a.grid_size();
    std::vector<double> integrand(m);
    if (p == 1.0) {
        for (std::size_t j = 0; j < m; ++j) integrand[j] = std::fabs(a.qvals()[j] - b.qvals()[j]);
        return grid::trapezoid(integrand);
    }
    if (p == 2.0) {
        for (std::size_t j = 0; j < m; ++j) {
            double d = a.qvals()[j] - b.qvals()[j];
            integrand[j] = d * d;
        }
        return std::sqrt(grid::trapezoid(integrand));
    }
    for (std::size_t j = 0; j < m; ++j)
        integrand[j] = std::pow(std::fabs(a.qvals()[j] - b.qvals()[j]), p);
    return std::pow(grid::trapezoid(integrand), 1.0 / p);
}

}  // namespace otproc
