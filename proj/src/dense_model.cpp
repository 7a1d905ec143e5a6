#include "otproc/dense_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otproc/errors.hpp"
#include "otproc/frechet.hpp"
#include "otproc/grid.hpp"
#include "otproc/warnings.hpp"

namespace otproc {

BaselinePair estimate_baselines(const std::vector<TransportMap>& transports) {
    if (transports.empty()) throw InvalidInputError("estimate_baselines: empty list");
    const std::size_t m = transports.front().grid_size();
    std::vector<TransportMap> plus, minus;
    for (const TransportMap& map : transports) {
        if (transport_sign(map) < 0)
            minus.push_back(map);
        else
            plus.push_back(map);  // sign 0 joins the positive set
    }
    BaselinePair out{TransportMap::identity(m), TransportMap::identity(m), plus.size(),
                     minus.size()};
    if (!plus.empty()) out.plus = mean_transport(plus);
    if (!minus.empty()) out.minus = mean_transport(minus);
    return out;
}

RescaledBaseline rescale_baseline(const TransportMap& map, double kappa) {
    if (!(kappa > 0.0)) throw InvalidParameterError("rescale_baseline: kappa must be > 0");
    const double nrm = norm1(map);
    if (nrm == 0.0)
        throw DegenerateBaselineError("rescale_baseline: baseline equals the identity (zero norm)");
    const std::size_t m = map.grid_size();

    // The map u + s (T(u) - u) stays monotone iff s <= du/(-dc) on every
    // segment where the centered increments dc are negative; endpoints are
    // pinned so monotonicity implies the range constraint.
    double s_max = std::numeric_limits<double>::infinity();
    const double du = grid::step(m);
    for (std::size_t j = 1; j < m; ++j) {
        double dc = (map.tvals()[j] - grid::point(j, m)) - (map.tvals()[j - 1] - grid::point(j - 1, m));
        if (dc < 0.0) s_max = std::min(s_max, du / (-dc));
    }
    double s = kappa / nrm;
    bool reduced = false;
    if (s > s_max) {
        s = s_max;
        reduced = true;
    }
    std::vector<double> v(m);
    for (std::size_t j = 0; j < m; ++j) {
        double u = grid::point(j, m);
        v[j] = u + s * (map.tvals()[j] - u);
    }
    TransportMap rescaled = TransportMap::sanitized(std::move(v));
    return RescaledBaseline{rescaled, norm1(rescaled), reduced};
}

std::size_t select_component_count(const EigenSystem& eig, std::size_t requested) {
    if (requested > 0) {
        if (requested > eig.count())
            throw InvalidParameterError("component count exceeds the decomposition size");
        return requested;
    }
    double total = std::accumulate(eig.eigenvalues.begin(), eig.eigenvalues.end(), 0.0);
    if (!(total > 0.0)) return 1;
    double cum = 0.0;
    std::size_t j = 0;
    for (; j < eig.count(); ++j) {
        cum += eig.eigenvalues[j];
        if (cum >= 0.95 * total) {
            ++j;
            break;
        }
    }
    return std::clamp<std::size_t>(j, 1, std::min<std::size_t>(20, eig.count()));
}

const DenseSubjectFit& FittedDenseModel::subject(const std::string& id) const {
    for (const DenseSubjectFit& s : subjects)
        if (s.id == id) return s;
    throw LookupError("unknown subject '" + id + "'");
}

FittedDenseModel fit_dense(const std::vector<TransportSeries>& panel, const DenseConfig& config) {
    if (panel.empty()) throw InvalidInputError("fit_dense: empty panel");
    if (!(config.kappa > 0.0)) throw InvalidParameterError("fit_dense: kappa must be > 0");

    double total_obs = 0.0;
    for (const TransportSeries& s : panel) {
        if (s.times.size() != s.transports.size() || s.times.empty())
            throw InvalidInputError("fit_dense: malformed series for subject '" + s.id + "'");
        if (s.times.size() < 2)
            throw InvalidInputError("fit_dense: subject '" + s.id +
                                    "' needs at least 2 observations");
        total_obs += static_cast<double>(s.times.size());
    }
    const double mean_obs = total_obs / static_cast<double>(panel.size());
    const double h =
        config.bandwidth > 0.0 ? config.bandwidth : default_bandwidth(panel.size(), mean_obs);

    // kappa-scaled signed norms per observation.
    std::vector<SubjectValues> raw(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
        raw[i].times = panel[i].times;
        raw[i].values.reserve(panel[i].times.size());
        for (const TransportMap& map : panel[i].transports)
            raw[i].values.push_back(norm1(map) * static_cast<double>(transport_sign(map)) /
                                    config.kappa);
    }

    CovarianceSurface surface = smooth_covariance(raw, h, config.kernel, config.time_grid);
    EigenSystem eig = eigendecompose(surface, config.time_grid);
    const std::size_t n_scores = select_component_count(eig, config.n_components);

    std::vector<DenseSubjectFit> subjects;
    subjects.reserve(panel.size());
    std::size_t n_reduced = 0;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        DenseSubjectFit fit;
        fit.id = panel[i].id;
        fit.times = panel[i].times;
        fit.scaled_values = raw[i].values;
        fit.scores = dense_scores(raw[i], eig, n_scores);

        BaselinePair base = estimate_baselines(panel[i].transports);
        fit.n_plus = base.n_plus;
        fit.n_minus = base.n_minus;
        fit.positive_set_empty = base.n_plus == 0;
        fit.baseline_plus = base.plus;
        fit.baseline_minus = base.minus;
        if (base.n_plus > 0 && norm1(base.plus) > 0.0) {
            RescaledBaseline r = rescale_baseline(base.plus, config.kappa);
            fit.baseline_plus = r.map;
            fit.kappa_plus = r.kappa_used;
            if (r.reduced) ++n_reduced;
        }
        if (base.n_minus > 0 && norm1(base.minus) > 0.0) {
            RescaledBaseline r = rescale_baseline(base.minus, config.kappa);
            fit.baseline_minus = r.map;
            fit.kappa_minus = r.kappa_used;
            if (r.reduced && base.n_plus == 0) ++n_reduced;
        }
        subjects.push_back(std::move(fit));
    }
    if (n_reduced > 0)
        warn("fit_dense: baseline norm " + std::to_string(config.kappa) + " infeasible for " +
             std::to_string(n_reduced) + " of " + std::to_string(panel.size()) +
             " subjects; reduced per subject (predictions rescale accordingly)");

    return FittedDenseModel{config, h, std::move(surface), std::move(eig), n_scores,
                            std::move(subjects)};
}

TransportMap predict_dense(const FittedDenseModel& model, const std::string& id, double t) {
    if (t < 0.0 || t > 1.0) throw InvalidParameterError("predict_dense: t must lie in [0,1]");
    const DenseSubjectFit& fit = model.subject(id);
    double u = 0.0;
    for (std::size_t k = 0; k < model.n_scores; ++k) u += fit.scores[k] * model.eig.eval(k, t);
    // The multiplier and the baseline must share one scale. Scores live on the
    // configured kappa scale; when the baseline rescale was infeasible the
    // achieved norm differs, and the kappa factors are realigned here (the
    // scale-invariance identity applied per subject).
    double kappa_used = fit.positive_set_empty ? fit.kappa_minus : fit.kappa_plus;
    if (kappa_used > 0.0) u *= model.config.kappa / kappa_used;
    u = std::clamp(u, -1.0, 1.0);
    if (fit.positive_set_empty) return scalar_mult(-u, fit.baseline_minus);
    return scalar_mult(u, fit.baseline_plus);
}

}  // namespace otproc
