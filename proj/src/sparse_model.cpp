#include "otproc/sparse_model.hpp"

#include <algorithm>
#include <cmath>

#include "otproc/errors.hpp"
#include "otproc/frechet.hpp"
#include "otproc/warnings.hpp"

namespace otproc {

namespace {

double pooled_norm_heuristic(const std::vector<TransportSeries>& panel) {
    std::vector<TransportMap> nonneg;
    double norm_sum = 0.0;
    std::size_t count = 0;
    for (const TransportSeries& s : panel) {
        for (const TransportMap& map : s.transports) {
            if (transport_sign(map) >= 0) nonneg.push_back(map);
            norm_sum += norm1(map);
            ++count;
        }
    }
    if (!nonneg.empty()) return norm1(mean_transport(nonneg));
    warn("fit_sparse: no nonnegative-sign transports; norm_t0 falls back to the mean "
         "transport norm");
    return count > 0 ? norm_sum / static_cast<double>(count) : 0.0;
}

}  // namespace

const SparseSubjectFit& FittedSparseModel::subject(const std::string& id) const {
    for (const SparseSubjectFit& s : subjects)
        if (s.id == id) return s;
    throw LookupError("unknown subject '" + id + "'");
}

FittedSparseModel fit_sparse(const std::vector<TransportSeries>& panel,
                             const SparseConfig& config) {
    if (panel.empty()) throw InvalidInputError("fit_sparse: empty panel");
    double total_obs = 0.0;
    for (const TransportSeries& s : panel) {
        if (s.times.size() != s.transports.size() || s.times.empty())
            throw InvalidInputError("fit_sparse: malformed series for subject '" + s.id + "'");
        total_obs += static_cast<double>(s.times.size());
    }
    const double mean_obs = total_obs / static_cast<double>(panel.size());
    const double h =
        config.bandwidth > 0.0 ? config.bandwidth : default_bandwidth(panel.size(), mean_obs);

    double norm_t0 = config.norm_t0;
    if (!(norm_t0 > 0.0)) {
        norm_t0 = pooled_norm_heuristic(panel);
        if (!(norm_t0 > 0.0))
            throw DegenerateBaselineError(
                "fit_sparse: pooled norm heuristic degenerated to 0; pass norm_t0 explicitly");
    }

    std::vector<SubjectValues> zraw(panel.size());
    std::vector<std::vector<double>> uraw(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
        zraw[i].times = panel[i].times;
        auto points = raw_scores(panel[i], norm_t0, config.link, 1.0);
        zraw[i].values.reserve(points.size());
        uraw[i].reserve(points.size());
        for (const RawScorePoint& p : points) {
            zraw[i].values.push_back(p.zhat);
            uraw[i].push_back(p.uhat);
        }
    }

    CovarianceSurface surface = smooth_covariance(zraw, h, config.kernel, config.time_grid);
    EigenSystem eig = eigendecompose(surface, config.time_grid);
    const std::size_t n_scores = select_component_count(eig, config.n_components);

    std::vector<SparseSubjectFit> subjects;
    subjects.reserve(panel.size());
    std::size_t n_reduced = 0;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        SparseSubjectFit fit;
        fit.id = panel[i].id;
        fit.times = panel[i].times;
        fit.uhat = uraw[i];
        fit.zhat = zraw[i].values;
        fit.scores = pace_scores(zraw[i], eig, surface, n_scores, config.ridge);

        BaselinePair base = estimate_baselines(panel[i].transports);
        fit.negative_branch = base.n_plus == 0;
        const TransportMap& side = fit.negative_branch ? base.minus : base.plus;
        fit.baseline_norm_raw = norm1(side);
        if (fit.baseline_norm_raw > 0.0) {
            RescaledBaseline r = rescale_baseline(side, norm_t0);
            fit.baseline = r.map;
            fit.norm_used = r.kappa_used;
            if (r.reduced) ++n_reduced;
        } else {
            fit.baseline = TransportMap::identity(panel[i].transports.front().grid_size());
            fit.norm_used = 0.0;
        }
        subjects.push_back(std::move(fit));
    }
    if (n_reduced > 0)
        warn("fit_sparse: norm_t0 " + std::to_string(norm_t0) + " infeasible for " +
             std::to_string(n_reduced) + " of " + std::to_string(panel.size()) +
             " subjects; reduced per subject (predictions rescale accordingly)");

    return FittedSparseModel{config,          h,        norm_t0, std::move(surface),
                             std::move(eig),  n_scores, std::move(subjects)};
}

TransportMap predict_sparse(const FittedSparseModel& model, const std::string& id, double t) {
    if (t < 0.0 || t > 1.0) throw InvalidParameterError("predict_sparse: t must lie in [0,1]");
    const SparseSubjectFit& fit = model.subject(id);
    double z = 0.0;
    for (std::size_t l = 0; l < model.n_scores; ++l) z += fit.scores[l] * model.eig.eval(l, t);
    double multiplier = model.config.link.forward(z);
    // Realign scales when the baseline rescale to norm_t0 was infeasible; the
    // clamp keeps the multiplier inside the scalar-multiplication domain.
    if (fit.norm_used > 0.0)
        multiplier = std::clamp(multiplier * model.norm_t0 / fit.norm_used, -1.0, 1.0);
    if (fit.negative_branch) multiplier = -multiplier;
    return scalar_mult(multiplier, fit.baseline);
}

}  // namespace otproc
