#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace otproc {

// Univariate probability measure on [0,1], represented by its quantile
// function F^{-1} sampled at the equispaced levels p_j = j/(M-1).
class GridMeasure {
public:
    // Validates: M >= 2, non-decreasing values, all entries in [0,1].
    explicit GridMeasure(std::vector<double> qvals);

    // Clamps to [0,1] and applies a running maximum before validating; use for
    // values produced by floating-point arithmetic that is monotone up to rounding.
    static GridMeasure sanitized(std::vector<double> qvals);

    static GridMeasure uniform(std::size_t grid_size);

    std::size_t grid_size() const noexcept { return qvals_.size(); }
    const std::vector<double>& qvals() const noexcept { return qvals_; }

    // Quantile function at an arbitrary level (linear interpolation).
    double quantile(double level) const;

    // CDF as the left-continuous generalized inverse of the quantile function.
    double cdf(double x) const;

private:
    GridMeasure() = default;
    std::vector<double> qvals_;
};

// Interpolated empirical quantile function: order statistics placed at the
// plotting positions (k-1)/(m-1), linearly interpolated and evaluated at the
// M grid levels. A single sample yields a constant quantile function.
GridMeasure empirical_quantile(std::span<const double> samples, std::size_t grid_size);

// p-Wasserstein distance via the 1-D closed form: the L^p distance between
// quantile functions, evaluated with trapezoidal quadrature on the grid.
double wasserstein_distance(const GridMeasure& a, const GridMeasure& b, double p);

}  // namespace otproc
