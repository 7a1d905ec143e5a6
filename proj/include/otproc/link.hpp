#pragma once

#include <string>

namespace otproc {

enum class LinkType { arctan, algebraic, logistic };

// Odd bijection g: R -> (-1,1) connecting the latent process Z to the
// multiplier process U = g(Z).
//   arctan:    g(x) = (2/pi) arctan(x),            g^{-1}(u) = tan(pi u / 2)
//   algebraic: g(x) = 2x / (1 + sqrt(1 + 4x^2)),   g^{-1}(u) = u / (1 - u^2)
//   logistic:  g(x) = tanh(x/2),                   g^{-1}(u) = log((1+u)/(1-u))
class LinkFunction {
public:
    explicit LinkFunction(LinkType type = LinkType::arctan) : type_(type) {}

    LinkType type() const noexcept { return type_; }
    double forward(double x) const;
    double inverse(double u) const;  // requires |u| < 1
    std::string name() const;

    static LinkFunction from_name(const std::string& name);

private:
    LinkType type_;
};

}  // namespace otproc
