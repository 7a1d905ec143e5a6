#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "otproc/kernels.hpp"
#include "otproc/link.hpp"
#include "otproc/panel.hpp"

namespace otproc {

// Clamp half-width applied to multiplier estimates before the link inverse.
inline constexpr double kLinkClamp = 1e-6;

// Symmetric surface on the equispaced [0,1]^2 time grid.
class CovarianceSurface {
public:
    explicit CovarianceSurface(Eigen::MatrixXd values);

    std::size_t grid_size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

    // Bilinear interpolation at (s,t), clamped to the grid.
    double operator()(double s, double t) const;

private:
    Eigen::MatrixXd values_;
};

// Eigenpairs of the covariance operator discretized with trapezoid weights.
// Eigenvalues are sorted descending and clipped at zero; eigenfunction rows
// are L2-orthonormal; the sign convention is integral(phi_k) >= 0, ties
// broken by phi_k(0) > 0.
struct EigenSystem {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd functions;  // count x G
    std::size_t grid_size = 0;
    double ortho_residual = 0.0;  // max |<phi_j,phi_k> - delta_jk| over retained pairs

    std::size_t count() const noexcept { return eigenvalues.size(); }
    double eval(std::size_t k, double t) const;
};

struct RawScorePoint {
    double time = 0.0;
    double uhat = 0.0;    // ||T|| sign(T) / norm_t0
    double zhat = 0.0;    // g^{-1} of the clamped uhat
    double scaled = 0.0;  // ||T|| sign(T) / kappa
};

std::vector<RawScorePoint> raw_scores(const TransportSeries& subject, double norm_t0,
                                      const LinkFunction& link, double kappa);

// Per-subject observation times and scalar values feeding the smoother or the
// score estimators.
struct SubjectValues {
    std::vector<double> times;
    std::vector<double> values;
};

// Local-linear covariance smoother: at each grid point (s,t) solves the
// weighted least squares over within-subject pairs j != l with raw products
// v_ij * v_il, weights w_i K_h(t_ij - s) K_h(t_il - t), w_i = 1/(n N_i (N_i-1)).
// Subjects with fewer than two observations are skipped with a warning. A grid
// point whose beta_0 is not identified retries with the bandwidth doubled (up
// to 3 times) and then fails as not estimable.
CovarianceSurface smooth_covariance(const std::vector<SubjectValues>& subjects, double h,
                                    const KernelSpec& kernel, std::size_t grid_size);

// Single-point evaluation of the same local fit, with the same widened-window
// retry semantics.
double smooth_covariance_at(const std::vector<SubjectValues>& subjects, double s, double t,
                            double h, const KernelSpec& kernel);

EigenSystem eigendecompose(const CovarianceSurface& surface, std::size_t n_components);

// Riemann-sum scores: xi_k = (1/N) sum_j value_j phi_k(t_j).
std::vector<double> dense_scores(const SubjectValues& subject, const EigenSystem& eig,
                                 std::size_t n_scores);

// Best-linear-predictor scores: chi_l = eta_l Psi_l' Sigma^{-1} z with
// Sigma_{lj} = surface(t_l, t_j); a ridge of ridge*trace/N is added when the
// condition number estimate exceeds 1e12.
std::vector<double> pace_scores(const SubjectValues& subject, const EigenSystem& eig,
                                const CovarianceSurface& surface, std::size_t n_scores,
                                double ridge = 1e-8);

}  // namespace otproc
