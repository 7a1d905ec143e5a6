#pragma once

#include <string>
#include <vector>

#include "otproc/covariance.hpp"
#include "otproc/panel.hpp"

namespace otproc {

// Sign-partitioned Fréchet means of a subject's transports. Transports with
// sign 0 join the positive set; an empty partition yields the identity with
// count 0.
struct BaselinePair {
    TransportMap plus;
    TransportMap minus;
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
};

BaselinePair estimate_baselines(const std::vector<TransportMap>& transports);

struct RescaledBaseline {
    TransportMap map;
    double kappa_used = 0.0;  // achieved norm; < requested when infeasible
    bool reduced = false;
};

// Rescales the centered part so that ||T - id||_1 = kappa. When the requested
// norm would break monotonicity or leave [0,1], kappa is reduced to the
// largest feasible value and reported via `reduced`.
RescaledBaseline rescale_baseline(const TransportMap& map, double kappa);

struct DenseConfig {
    double kappa = 1.0;
    double bandwidth = 0.0;        // <= 0: plug-in rule (n Nbar^2)^(-1/6)
    KernelSpec kernel{};
    std::size_t time_grid = 51;    // G
    std::size_t n_components = 0;  // 0: smallest J with >= 95% eigenvalue mass, capped at 20
};

struct DenseSubjectFit {
    std::string id;
    std::vector<double> times;
    std::vector<double> scaled_values;  // ||T|| sign(T) / kappa
    std::vector<double> scores;         // xi_{ik,kappa}
    TransportMap baseline_plus;
    TransportMap baseline_minus;
    double kappa_plus = 0.0;   // achieved norms after the feasibility check
    double kappa_minus = 0.0;
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    bool positive_set_empty = false;
};

struct FittedDenseModel {
    DenseConfig config;
    double bandwidth_used = 0.0;
    CovarianceSurface surface;  // smoothed C_kappa
    EigenSystem eig;
    std::size_t n_scores = 0;   // J
    std::vector<DenseSubjectFit> subjects;

    const DenseSubjectFit& subject(const std::string& id) const;
};

FittedDenseModel fit_dense(const std::vector<TransportSeries>& panel, const DenseConfig& config);

// Truncated multiplier reconstruction clamped to the domain of the scalar
// multiplication; subjects whose positive index set is empty use the
// negative-branch fallback against the minus baseline.
TransportMap predict_dense(const FittedDenseModel& model, const std::string& id, double t);

// Smallest count reaching 95% of the clipped eigenvalue mass, capped at 20.
std::size_t select_component_count(const EigenSystem& eig, std::size_t requested);

}  // namespace otproc
