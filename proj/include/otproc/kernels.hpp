#pragma once

#include <cmath>
#include <string>

namespace otproc {

enum class KernelType { epanechnikov, uniform, triweight };

// Symmetric density kernel on [-1,1].
struct KernelSpec {
    KernelType type = KernelType::epanechnikov;

    double operator()(double u) const {
        if (std::fabs(u) > 1.0) return 0.0;
        switch (type) {
            case KernelType::uniform:
                return 0.5;
            case KernelType::triweight: {
                double w = 1.0 - u * u;
                return (35.0 / 32.0) * w * w * w;
            }
            case KernelType::epanechnikov:
            default:
                return 0.75 * (1.0 - u * u);
        }
    }

    // K_h(x) = K(x/h)/h.
    double scaled(double x, double h) const { return (*this)(x / h) / h; }
};

KernelSpec kernel_from_name(const std::string& name);
std::string kernel_name(const KernelSpec& kernel);

// Plug-in bandwidth rule h = (n * mean_obs^2)^(-1/6).
inline double default_bandwidth(std::size_t n_subjects, double mean_obs) {
    return std::pow(static_cast<double>(n_subjects) * mean_obs * mean_obs, -1.0 / 6.0);
}

}  // namespace otproc
