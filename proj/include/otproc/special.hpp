#pragma once

namespace otproc {

double log_beta(double a, double b);

// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
double reg_incomplete_beta(double x, double a, double b);

// Beta(a,b) quantile by bisection on the regularized incomplete beta, to an
// interval width of 1e-10.
double beta_quantile(double p, double a, double b);

}  // namespace otproc
