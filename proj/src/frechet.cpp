#include "otproc/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "otproc/errors.hpp"
#include "otproc/grid.hpp"
#include "otproc/isotonic.hpp"

namespace otproc {

GridMeasure cross_sectional_mean(const std::vector<GridMeasure>& measures) {
    if (measures.empty()) throw InvalidInputError("cross_sectional_mean: empty list");
    const std::size_t m = measures.front().grid_size();
    std::vector<double> q(m, 0.0);
    for (const GridMeasure& mu : measures) {
        if (mu.grid_size() != m)
            throw IncompatibleGridError("cross_sectional_mean: mismatched grid sizes");
        for (std::size_t j = 0; j < m; ++j) q[j] += mu.qvals()[j];
    }
    for (double& x : q) x /= static_cast<double>(measures.size());
    return GridMeasure::sanitized(std::move(q));
}

LocalLinearWeights local_frechet_weights(const Panel& measures, double t, double h,
                                         const KernelSpec& kernel) {
    if (!(h > 0.0)) throw InvalidParameterError("local_frechet_weights: bandwidth must be > 0");
    if (measures.subjects.empty()) throw InvalidInputError("local_frechet_weights: empty panel");
    const std::size_t n = measures.subjects.size();

    LocalLinearWeights w;
    std::set<double> support_times;
    for (const Subject& s : measures.subjects) {
        const double inv_n_ni = 1.0 / (static_cast<double>(n) * static_cast<double>(s.observations.size()));
        for (const Observation& o : s.observations) {
            double k = kernel.scaled(o.time - t, h);
            if (k > 0.0) support_times.insert(o.time);
            double d = o.time - t;
            w.kappa0 += inv_n_ni * k;
            w.kappa1 += inv_n_ni * k * d;
            w.kappa2 += inv_n_ni * k * d * d;
        }
    }
    if (support_times.size() < 2)
        throw InsufficientDataError("local_frechet_weights: fewer than 2 support points in the window at t=" +
                                    std::to_string(t) + ", h=" + std::to_string(h));
    w.sigma0_sq = w.kappa0 * w.kappa2 - w.kappa1 * w.kappa1;
    if (!(w.sigma0_sq > 0.0))
        throw DegenerateWindowError("local_frechet_weights: degenerate window (sigma0^2 <= 0) at t=" +
                                    std::to_string(t));

    w.per_subject.resize(n);
    double sum = 0.0, first_moment = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Subject& s = measures.subjects[i];
        const double inv_n_ni = 1.0 / (static_cast<double>(n) * static_cast<double>(s.observations.size()));
        w.per_subject[i].resize(s.observations.size());
        for (std::size_t j = 0; j < s.observations.size(); ++j) {
            double d = s.observations[j].time - t;
            double omega = kernel.scaled(d, h) * (w.kappa2 - w.kappa1 * d) / w.sigma0_sq;
            double wij = inv_n_ni * omega;
            w.per_subject[i][j] = wij;
            sum += wij;
            first_moment += wij * d;
        }
    }
    // Local-linear moment conditions.
    if (std::fabs(sum - 1.0) > 1e-10 || std::fabs(first_moment) > 1e-10)
        throw NumericalError("local_frechet_weights: moment conditions violated at t=" + std::to_string(t));
    return w;
}

GridMeasure local_frechet_mean(const Panel& measures, double t, double h, const KernelSpec& kernel) {
    LocalLinearWeights w = local_frechet_weights(measures, t, h, kernel);
    const std::size_t m =
        std::get<GridMeasure>(measures.subjects.front().observations.front().payload).grid_size();
    std::vector<double> q(m, 0.0);
    for (std::size_t i = 0; i < measures.subjects.size(); ++i) {
        const Subject& s = measures.subjects[i];
        for (std::size_t j = 0; j < s.observations.size(); ++j) {
            double wij = w.per_subject[i][j];
            if (wij == 0.0) continue;
            const GridMeasure& mu = std::get<GridMeasure>(s.observations[j].payload);
            for (std::size_t g = 0; g < m; ++g) q[g] += wij * mu.qvals()[g];
        }
    }
    std::vector<double> projected = isotonic_regression(q);
    return GridMeasure::sanitized(std::move(projected));
}

namespace {

GridMeasure interpolate_path(const std::vector<double>& times,
                             const std::vector<GridMeasure>& path, double t) {
    if (t <= times.front()) return path.front();
    if (t >= times.back()) return path.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times.begin());
    double frac = (t - times[k - 1]) / (times[k] - times[k - 1]);
    const std::vector<double>& lo = path[k - 1].qvals();
    const std::vector<double>& hi = path[k].qvals();
    std::vector<double> q(lo.size());
    for (std::size_t j = 0; j < q.size(); ++j) q[j] = lo[j] + frac * (hi[j] - lo[j]);
    return GridMeasure::sanitized(std::move(q));
}

}  // namespace

CenteredPanel center_panel(const Panel& panel, const CenteringConfig& config) {
    Panel measures = to_measure_panel(panel, config.grid_size);

    CenteredPanel out;
    out.design = panel.design;

    if (panel.design == Design::fixed) {
        // Barycenter per shared observation time.
        std::map<double, std::vector<const GridMeasure*>> by_time;
        for (const Subject& s : measures.subjects)
            for (const Observation& o : s.observations)
                by_time[o.time].push_back(&std::get<GridMeasure>(o.payload));
        std::map<double, GridMeasure> barycenter;
        for (const auto& [time, group] : by_time) {
            std::vector<GridMeasure> local;
            local.reserve(group.size());
            for (const GridMeasure* mu : group) local.push_back(*mu);
            barycenter.emplace(time, cross_sectional_mean(local));
            out.barycenter_times.push_back(time);
            out.barycenter_path.push_back(barycenter.at(time));
        }
        for (const Subject& s : measures.subjects) {
            TransportSeries series;
            series.id = s.id;
            for (const Observation& o : s.observations) {
                series.times.push_back(o.time);
                series.transports.push_back(
                    optimal_transport(barycenter.at(o.time), std::get<GridMeasure>(o.payload)));
            }
            out.transports.push_back(std::move(series));
        }
        return out;
    }

    if (!config.bandwidth.has_value())
        throw ConfigError("center_panel: a bandwidth is required for random designs");
    const double h = *config.bandwidth;
    const std::size_t cache = std::max<std::size_t>(config.barycenter_cache, 2);
    out.barycenter_times = grid::points(cache);
    out.barycenter_path.reserve(cache);
    for (double tc : out.barycenter_times)
        out.barycenter_path.push_back(local_frechet_mean(measures, tc, h, config.kernel));
    for (const Subject& s : measures.subjects) {
        TransportSeries series;
        series.id = s.id;
        for (const Observation& o : s.observations) {
            GridMeasure bary = interpolate_path(out.barycenter_times, out.barycenter_path, o.time);
            series.times.push_back(o.time);
            series.transports.push_back(optimal_transport(bary, std::get<GridMeasure>(o.payload)));
        }
        out.transports.push_back(std::move(series));
    }
    return out;
}

TransportMap mean_transport(const std::vector<TransportMap>& transports) {
    if (transports.empty()) throw InvalidInputError("mean_transport: empty list");
    const std::size_t m = transports.front().grid_size();
    std::vector<double> v(m, 0.0);
    for (const TransportMap& t : transports) {
        if (t.grid_size() != m)
            throw IncompatibleGridError("mean_transport: mismatched grid sizes");
        for (std::size_t j = 0; j < m; ++j) v[j] += t.tvals()[j];
    }
    for (double& x : v) x /= static_cast<double>(transports.size());
    return TransportMap::sanitized(std::move(v));
}

}  // namespace otproc
