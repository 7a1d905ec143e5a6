#include "otproc/isotonic.hpp"

#include <cstddef>

namespace otproc {

std::vector<double> isotonic_regression(std::span<const double> y) {
    const std::size_t n = y.size();
    // Blocks of pooled values: (mean, count), merged while out of order.
    std::vector<double> mean;
    std::vector<std::size_t> count;
    mean.reserve(n);
    count.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double m = y[i];
        std::size_t c = 1;
        while (!mean.empty() && mean.back() >= m) {
            m = (m * static_cast<double>(c) + mean.back() * static_cast<double>(count.back())) /
                static_cast<double>(c + count.back());
            c += count.back();
            mean.pop_back();
            count.pop_back();
        }
        mean.push_back(m);
        count.push_back(c);
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t b = 0; b < mean.size(); ++b)
        out.insert(out.end(), count[b], mean[b]);
    return out;
}

}  // namespace otproc
