#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

// Helpers for functions sampled on the equispaced grid j/(M-1), j=0..M-1 over [0,1].
namespace otproc::grid {

inline double step(std::size_t m) { return 1.0 / static_cast<double>(m - 1); }

inline double point(std::size_t j, std::size_t m) {
    return static_cast<double>(j) / static_cast<double>(m - 1);
}

inline std::vector<double> points(std::size_t m) {
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = point(j, m);
    return out;
}

// Trapezoidal integral over [0,1] of grid samples.
inline double trapezoid(std::span<const double> v) {
    const std::size_t m = v.size();
    double sum = 0.5 * (v.front() + v.back());
    for (std::size_t j = 1; j + 1 < m; ++j) sum += v[j];
    return sum * step(m);
}

inline std::vector<double> trapezoid_weights(std::size_t m) {
    std::vector<double> w(m, step(m));
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

// Piecewise-linear interpolation at x; x is clamped to [0,1].
inline double interp(std::span<const double> v, double x) {
    const std::size_t m = v.size();
    double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(m - 1);
    std::size_t j = std::min(static_cast<std::size_t>(pos), m - 2);
    double frac = pos - static_cast<double>(j);
    return v[j] + frac * (v[j + 1] - v[j]);
}

// Left-continuous generalized inverse of a non-decreasing grid function:
// inf{u : v(u) >= y}, with 0 when y <= v(0) and 1 when y > v(1).
inline double generalized_inverse_at(std::span<const double> v, double y) {
    const std::size_t m = v.size();
    if (y <= v.front()) return 0.0;
    if (y > v.back()) return 1.0;
    auto it = std::lower_bound(v.begin(), v.end(), y);
    std::size_t k = static_cast<std::size_t>(it - v.begin());  // v[k] >= y > v[k-1], k >= 1
    if (v[k] == y) return point(k, m);  // the interpolant first reaches y at the node
    double denom = v[k] - v[k - 1];
    return point(k - 1, m) + step(m) * ((y - v[k - 1]) / denom);
}

inline void clamp01(std::vector<double>& v) {
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
}

// Monotone fixup: running maximum. A no-op for already non-decreasing data.
inline void cumulative_max(std::vector<double>& v) {
    for (std::size_t j = 1; j < v.size(); ++j) v[j] = std::max(v[j], v[j - 1]);
}

}  // namespace otproc::grid
