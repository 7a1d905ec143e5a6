#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "otproc/dense_model.hpp"
#include "otproc/link.hpp"
#include "otproc/panel.hpp"
#include "otproc/rng.hpp"

namespace otproc {

struct SimConfig {
    std::size_t n = 100;        // subjects
    std::size_t N = 20;         // observations per subject
    std::size_t m = 50;         // samples per distribution; 0 = exact transports
    std::size_t reps = 200;
    Design design = Design::random;
    std::size_t k_gen = 50;     // generator components
    LinkFunction link{};        // g(x) = (2/pi) arctan x
    double kappa = 1.0;
    double bandwidth = 0.0;     // <= 0: plug-in rule
    KernelSpec kernel{};
    std::size_t quantile_grid = 101;  // M
    std::size_t time_grid = 51;       // G
    std::size_t n_components = 0;     // J; 0 = 95% rule
    std::uint64_t seed = 1;
    double baseline_norm = 0.0;  // <= 0: mean of the replication's unscaled norms
    std::size_t eval_points = 51;
    std::size_t threads = 0;     // 0: hardware concurrency

    void validate() const;
};

struct SubjectTruth {
    std::vector<double> xi;   // generator scores, k_gen entries
    TransportMap t0;          // rescaled baseline transport
    TransportMap t0_inverse;
    double norm_t0 = 0.0;
};

struct GeneratedData {
    std::vector<TransportSeries> observed;  // empirical (or exact) transports
    std::vector<SubjectTruth> truth;
    double common_norm = 0.0;
};

// Cosine generator basis: phi_1 = 1, phi_k(x) = cos(2(k-1) pi x).
double generator_basis(std::size_t k, double x);

double truth_z(const SubjectTruth& subject, double t);
TransportMap truth_transport(const SubjectTruth& subject, double t, const LinkFunction& link);

// Draws one replication: scores xi_ik ~ N(0, k^-2), baselines from
// Beta(U(3,4), U(1,2)) quantiles rescaled to a common norm, times uniform
// (random design) or equispaced (fixed design), and m pushforward samples per
// observation; the base measure is uniform, so the observed transport is the
// endpoint-pinned empirical quantile of the samples.
GeneratedData generate_truth(const SimConfig& config, Rng& rng);

// (1/n) sum_i of the trapezoid-in-t integral of d_{W,1} between predicted and
// true transports, on `eval_points` equispaced times.
double imse(const std::vector<SubjectTruth>& truth,
            const std::function<TransportMap(std::size_t, double)>& predict,
            const LinkFunction& link, std::size_t eval_points);

struct ImseResult {
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> per_rep;  // NaN marks failed replications
    std::size_t failures = 0;
    SimConfig config;
    double wall_seconds = 0.0;
    std::string rng_algorithm;
};

// Runs `reps` independent replications (generate -> fit_dense -> predict ->
// imse) on per-replication substreams; results are deterministic for a fixed
// seed regardless of the thread count. More than 10% failed replications is a
// study-level error.
ImseResult run_study(const SimConfig& config);

}  // namespace otproc
