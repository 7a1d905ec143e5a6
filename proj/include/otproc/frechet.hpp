#pragma once

#include <optional>
#include <vector>

#include "otproc/kernels.hpp"
#include "otproc/panel.hpp"

namespace otproc {

// Cross-sectional Fréchet mean under d_{W,2}: the pointwise average of the
// quantile functions.
GridMeasure cross_sectional_mean(const std::vector<GridMeasure>& measures);

// Local-linear weights for the Fréchet regression at query time t. The
// per-observation weights include the 1/(n N_i) subject factor, sum to one
// and have zero first moment around t.
struct LocalLinearWeights {
    std::vector<std::vector<double>> per_subject;  // aligned with panel subjects/observations
    double kappa0 = 0.0, kappa1 = 0.0, kappa2 = 0.0;
    double sigma0_sq = 0.0;
};

LocalLinearWeights local_frechet_weights(const Panel& measures, double t, double h,
                                         const KernelSpec& kernel);

// Local Fréchet mean at time t: weighted quantile average with local-linear
// weights, projected back to a monotone quantile function (isotonic
// regression; boundary weights can be negative) and clamped to [0,1].
GridMeasure local_frechet_mean(const Panel& measures, double t, double h,
                               const KernelSpec& kernel = {});

struct CenteringConfig {
    std::size_t grid_size = 101;          // quantile grid M
    std::optional<double> bandwidth;      // required for random designs
    KernelSpec kernel{};
    std::size_t barycenter_cache = 51;    // barycenter path cache (random designs)
};

// A panel centered into transports, together with the barycenter path used.
struct CenteredPanel {
    std::vector<TransportSeries> transports;
    Design design = Design::fixed;
    std::vector<double> barycenter_times;
    std::vector<GridMeasure> barycenter_path;
};

// Replaces each observation by the optimal transport from the barycenter at
// its time to the observed measure. Fixed designs use the per-time
// cross-sectional mean; random designs use local Fréchet regression on a
// cached time grid and interpolate.
CenteredPanel center_panel(const Panel& panel, const CenteringConfig& config);

// Fréchet mean in transport space: the pointwise average, in T by convexity.
TransportMap mean_transport(const std::vector<TransportMap>& transports);

}  // namespace otproc
