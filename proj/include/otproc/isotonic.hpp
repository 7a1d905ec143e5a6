#pragma once

#include <span>
#include <vector>

namespace otproc {

// L2 projection onto non-decreasing sequences (pool-adjacent-violators),
// uniform weights.
std::vector<double> isotonic_regression(std::span<const double> y);

}  // namespace otproc
