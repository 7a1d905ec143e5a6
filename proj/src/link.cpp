#include "otproc/link.hpp"

#include <cmath>
#include <numbers>

#include "otproc/errors.hpp"

namespace otproc {

double LinkFunction::forward(double x) const {
    switch (type_) {
        case LinkType::arctan:
            return (2.0 / std::numbers::pi) * std::atan(x);
        case LinkType::algebraic:
            // (sqrt(1+4x^2)-1)/(2x) in a form that is exact at x = 0.
            return 2.0 * x / (1.0 + std::sqrt(1.0 + 4.0 * x * x));
        case LinkType::logistic:
        default:
            return std::tanh(0.5 * x);
    }
}

double LinkFunction::inverse(double u) const {
    if (!(std::fabs(u) < 1.0))
        throw InvalidParameterError("LinkFunction::inverse: argument must lie in (-1,1)");
    switch (type_) {
        case LinkType::arctan:
            return std::tan(std::numbers::pi * u / 2.0);
        case LinkType::algebraic:
            return u / (1.0 - u * u);
        case LinkType::logistic:
        default:
            return 2.0 * std::atanh(u);
    }
}

std::string LinkFunction::name() const {
    switch (type_) {
        case LinkType::arctan: return "arctan";
        case LinkType::algebraic: return "algebraic";
        case LinkType::logistic: default: return "logistic";
    }
}

LinkFunction LinkFunction::from_name(const std::string& name) {
    if (name == "arctan") return LinkFunction(LinkType::arctan);
    if (name == "algebraic") return LinkFunction(LinkType::algebraic);
    if (name == "logistic") return LinkFunction(LinkType::logistic);
    throw ConfigError("unknown link '" + name + "' (expected arctan, algebraic or logistic)");
}

}  // namespace otproc
