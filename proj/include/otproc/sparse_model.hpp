#pragma once

#include <string>
#include <vector>

#include "otproc/covariance.hpp"
#include "otproc/dense_model.hpp"
#include "otproc/panel.hpp"

namespace otproc {

struct SparseConfig {
    double norm_t0 = 0.0;          // <= 0: norm of the pooled positive mean transport
    LinkFunction link{};           // arctan by default
    double bandwidth = 0.0;        // <= 0: plug-in rule (n Nbar^2)^(-1/6)
    KernelSpec kernel{};
    std::size_t time_grid = 51;    // G
    std::size_t n_components = 0;  // 0: smallest J with >= 95% eigenvalue mass, capped at 20
    double ridge = 1e-8;
};

struct SparseSubjectFit {
    std::string id;
    std::vector<double> times;
    std::vector<double> uhat;       // ||T|| sign(T) / norm_t0
    std::vector<double> zhat;
    std::vector<double> scores;     // chi_{il}
    TransportMap baseline;          // rescaled to norm_t0
    bool negative_branch = false;   // all observed signs negative: use -g(Z) against the minus mean
    double baseline_norm_raw = 0.0; // ||T~_{i0}||_1 before rescaling (diagnostic)
    double norm_used = 0.0;         // achieved norm after the feasibility check
};

struct FittedSparseModel {
    SparseConfig config;
    double bandwidth_used = 0.0;
    double norm_t0 = 0.0;
    CovarianceSurface surface;  // smoothed D
    EigenSystem eig;
    std::size_t n_scores = 0;   // J
    std::vector<SparseSubjectFit> subjects;

    const SparseSubjectFit& subject(const std::string& id) const;
};

FittedSparseModel fit_sparse(const std::vector<TransportSeries>& panel, const SparseConfig& config);

// g(Z_i^J(t)) applied to the subject baseline; the link output lies in (-1,1)
// so no clamp is needed.
TransportMap predict_sparse(const FittedSparseModel& model, const std::string& id, double t);

}  // namespace otproc
