#include "otproc/kernels.hpp"

#include "otproc/errors.hpp"

namespace otproc {

KernelSpec kernel_from_name(const std::string& name) {
    if (name == "epanechnikov") return KernelSpec{KernelType::epanechnikov};
    if (name == "uniform") return KernelSpec{KernelType::uniform};
    if (name == "triweight") return KernelSpec{KernelType::triweight};
    throw ConfigError("unknown kernel '" + name + "' (expected epanechnikov, uniform or triweight)");
}

std::string kernel_name(const KernelSpec& kernel) {
    switch (kernel.type) {
        case KernelType::uniform: return "uniform";
        case KernelType::triweight: return "triweight";
        case KernelType::epanechnikov: default: return "epanechnikov";
    }
}

}  // namespace otproc
