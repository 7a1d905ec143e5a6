#include "otproc/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "otproc/errors.hpp"
#include "otproc/grid.hpp"
#include "otproc/warnings.hpp"

namespace otproc {

CovarianceSurface::CovarianceSurface(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols() || values_.rows() < 2)
        throw InvalidInputError("CovarianceSurface: values must be a square matrix of size >= 2");
    if (!values_.allFinite())
        throw InvalidInputError("CovarianceSurface: non-finite entries");
    double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
        throw InvalidInputError("CovarianceSurface: asymmetry " + std::to_string(asym) +
                                " exceeds 1e-12");
}

double CovarianceSurface::operator()(double s, double t) const {
    const std::size_t g = grid_size();
    double ps = std::clamp(s, 0.0, 1.0) * static_cast<double>(g - 1);
    double pt = std::clamp(t, 0.0, 1.0) * static_cast<double>(g - 1);
    std::size_t is = std::min(static_cast<std::size_t>(ps), g - 2);
    std::size_t it = std::min(static_cast<std::size_t>(pt), g - 2);
    double fs = ps - static_cast<double>(is);
    double ft = pt - static_cast<double>(it);
    return (1.0 - fs) * (1.0 - ft) * values_(is, it) + fs * (1.0 - ft) * values_(is + 1, it) +
           (1.0 - fs) * ft * values_(is, it + 1) + fs * ft * values_(is + 1, it + 1);
}

double EigenSystem::eval(std::size_t k, double t) const {
    const std::size_t g = grid_size;
    double pos = std::clamp(t, 0.0, 1.0) * static_cast<double>(g - 1);
    std::size_t j = std::min(static_cast<std::size_t>(pos), g - 2);
    double frac = pos - static_cast<double>(j);
    return functions(k, j) + frac * (functions(k, j + 1) - functions(k, j));
}

std::vector<RawScorePoint> raw_scores(const TransportSeries& subject, double norm_t0,
                                      const LinkFunction& link, double kappa) {
    if (!(norm_t0 > 0.0)) throw InvalidParameterError("raw_scores: norm_t0 must be > 0");
    if (!(kappa > 0.0)) throw InvalidParameterError("raw_scores: kappa must be > 0");
    std::vector<RawScorePoint> out;
    out.reserve(subject.times.size());
    for (std::size_t j = 0; j < subject.times.size(); ++j) {
        const TransportMap& map = subject.transports[j];
        double signed_norm = norm1(map) * static_cast<double>(transport_sign(map));
        RawScorePoint p;
        p.time = subject.times[j];
        p.uhat = std::clamp(signed_norm / norm_t0, -1.0 + kLinkClamp, 1.0 - kLinkClamp);
        p.zhat = link.inverse(p.uhat);
        p.scaled = signed_norm / kappa;
        out.push_back(p);
    }
    return out;
}

namespace {

// Solves the 3x3 local normal equations. beta_0 is reported only when it is
// identified, i.e. when e_0 carries no mass in the (numerical) null space of S.
std::optional<double> solve_beta0(const Eigen::Matrix3d& S, const Eigen::Vector3d& r) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
    if (es.info() != Eigen::Success) return std::nullopt;
    const Eigen::Vector3d& lambda = es.eigenvalues();
    const Eigen::Matrix3d& V = es.eigenvectors();
    double lmax = lambda(2);
    if (!(lmax > 0.0)) return std::nullopt;
    const double tol = lmax * 1e-12;
    double null_mass = 0.0;
    Eigen::Vector3d beta = Eigen::Vector3d::Zero();
    for (int k = 0; k < 3; ++k) {
        if (lambda(k) <= tol) {
            null_mass += V(0, k) * V(0, k);
        } else {
            beta += V.col(k) * (V.col(k).dot(r) / lambda(k));
        }
    }
    if (null_mass > 1e-10) return std::nullopt;
    return beta(0);
}

struct SubjectMoments {
    // Kernel and value moments per grid node: k_r = sum_j K_h(t_j-g)(t_j-g)^r,
    // m_r likewise with an extra v_j factor.
    std::vector<double> k0, k1, k2, m0, m1;
    std::vector<std::vector<std::uint32_t>> active;  // observations with K > 0 per node
    double weight = 0.0;                             // 1/(n N (N-1))
};

// Direct accumulation over all pairs j != l for one grid point; used by the
// widened-bandwidth retry path.
std::optional<double> direct_point(const std::vector<const SubjectValues*>& subjects, double s,
                                   double t, double h, const KernelSpec& kernel,
                                   std::size_t n_used) {
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (const SubjectValues* sub : subjects) {
        const std::size_t N = sub->times.size();
        const double w = 1.0 / (static_cast<double>(n_used) * static_cast<double>(N) *
                                static_cast<double>(N - 1));
        for (std::size_t j = 0; j < N; ++j) {
            double a = sub->times[j] - s;
            double ka = kernel.scaled(a, h);
            if (ka == 0.0) continue;
            for (std::size_t l = 0; l < N; ++l) {
                if (l == j) continue;
                double b = sub->times[l] - t;
                double kb = kernel.scaled(b, h);
                if (kb == 0.0) continue;
                double wt = w * ka * kb;
                double y = sub->values[j] * sub->values[l];
                Eigen::Vector3d x(1.0, a, b);
                S += wt * x * x.transpose();
                r += wt * y * x;
            }
        }
    }
    return solve_beta0(S, r);
}

}  // namespace

CovarianceSurface smooth_covariance(const std::vector<SubjectValues>& subjects, double h,
                                    const KernelSpec& kernel, std::size_t grid_size) {
    if (!(h > 0.0)) throw InvalidParameterError("smooth_covariance: bandwidth must be > 0");
    if (grid_size < 2) throw InvalidParameterError("smooth_covariance: grid size must be >= 2");

    std::vector<const SubjectValues*> used;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const SubjectValues& sub = subjects[i];
        if (sub.times.size() != sub.values.size())
            throw InvalidInputError("smooth_covariance: times/values size mismatch");
        if (sub.times.size() < 2) {
            warn("smooth_covariance: subject " + std::to_string(i) +
                 " has fewer than 2 observations and is skipped");
            continue;
        }
        used.push_back(&sub);
    }
    if (used.empty())
        throw NotEstimableError("smooth_covariance: no subject contributes off-diagonal pairs");
    const std::size_t n_used = used.size();
    const std::size_t G = grid_size;
    const auto nodes = grid::points(G);

    // Per-subject kernel/value moments at every grid node.
    std::vector<SubjectMoments> moments(n_used);
    for (std::size_t i = 0; i < n_used; ++i) {
        const SubjectValues& sub = *used[i];
        const std::size_t N = sub.times.size();
        SubjectMoments& mom = moments[i];
        mom.k0.assign(G, 0.0);
        mom.k1.assign(G, 0.0);
        mom.k2.assign(G, 0.0);
        mom.m0.assign(G, 0.0);
        mom.m1.assign(G, 0.0);
        mom.active.assign(G, {});
        mom.weight = 1.0 / (static_cast<double>(n_used) * static_cast<double>(N) *
                            static_cast<double>(N - 1));
        for (std::size_t j = 0; j < N; ++j) {
            double tj = sub.times[j];
            double span = h * static_cast<double>(G - 1);
            double center = tj * static_cast<double>(G - 1);
            auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(center - span - 1e-9)));
            auto hi = static_cast<std::size_t>(
                std::min<double>(static_cast<double>(G - 1), std::floor(center + span + 1e-9)));
            for (std::size_t g = lo; g <= hi && g < G; ++g) {
                double d = tj - nodes[g];
                double k = kernel.scaled(d, h);
                if (k == 0.0) continue;
                mom.k0[g] += k;
                mom.k1[g] += k * d;
                mom.k2[g] += k * d * d;
                mom.m0[g] += k * sub.values[j];
                mom.m1[g] += k * d * sub.values[j];
                mom.active[g].push_back(static_cast<std::uint32_t>(j));
            }
        }
    }

    Eigen::MatrixXd values(G, G);
    for (std::size_t gs = 0; gs < G; ++gs) {
        for (std::size_t gt = gs; gt < G; ++gt) {
            const double s = nodes[gs];
            const double t = nodes[gt];
            Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
            Eigen::Vector3d r = Eigen::Vector3d::Zero();
            for (std::size_t i = 0; i < n_used; ++i) {
                const SubjectValues& sub = *used[i];
                const SubjectMoments& mom = moments[i];
                // Diagonal (j = l) corrections to the separable pair sums.
                double d00 = 0, d10 = 0, d01 = 0, d20 = 0, d11 = 0, d02 = 0;
                double e00 = 0, e10 = 0, e01 = 0;
                for (std::uint32_t j : mom.active[gs]) {
                    double a = sub.times[j] - s;
                    double b = sub.times[j] - t;
                    double kb = kernel.scaled(b, h);
                    if (kb == 0.0) continue;
                    double base = kernel.scaled(a, h) * kb;
                    double v2 = sub.values[j] * sub.values[j];
                    d00 += base;
                    d10 += base * a;
                    d01 += base * b;
                    d20 += base * a * a;
                    d11 += base * a * b;
                    d02 += base * b * b;
                    e00 += base * v2;
                    e10 += base * a * v2;
                    e01 += base * b * v2;
                }
                const double w = mom.weight;
                S(0, 0) += w * (mom.k0[gs] * mom.k0[gt] - d00);
                S(0, 1) += w * (mom.k1[gs] * mom.k0[gt] - d10);
                S(0, 2) += w * (mom.k0[gs] * mom.k1[gt] - d01);
                S(1, 1) += w * (mom.k2[gs] * mom.k0[gt] - d20);
                S(1, 2) += w * (mom.k1[gs] * mom.k1[gt] - d11);
                S(2, 2) += w * (mom.k0[gs] * mom.k2[gt] - d02);
                r(0) += w * (mom.m0[gs] * mom.m0[gt] - e00);
                r(1) += w * (mom.m1[gs] * mom.m0[gt] - e10);
                r(2) += w * (mom.m0[gs] * mom.m1[gt] - e01);
            }
            S(1, 0) = S(0, 1);
            S(2, 0) = S(0, 2);
            S(2, 1) = S(1, 2);

            std::optional<double> beta0 = solve_beta0(S, r);
            double h_eff = h;
            for (int attempt = 0; !beta0 && attempt < 3; ++attempt) {
                h_eff *= 2.0;
                beta0 = direct_point(used, s, t, h_eff, kernel, n_used);
            }
            if (!beta0)
                throw NotEstimableError("smooth_covariance: surface not estimable at (" +
                                        std::to_string(s) + ", " + std::to_string(t) +
                                        ") even after widening the window");
            values(gs, gt) = *beta0;
            values(gt, gs) = *beta0;
        }
    }
    return CovarianceSurface(std::move(values));
}

double smooth_covariance_at(const std::vector<SubjectValues>& subjects, double s, double t,
                            double h, const KernelSpec& kernel) {
    if (!(h > 0.0)) throw InvalidParameterError("smooth_covariance_at: bandwidth must be > 0");
    std::vector<const SubjectValues*> used;
    for (const SubjectValues& sub : subjects) {
        if (sub.times.size() != sub.values.size())
            throw InvalidInputError("smooth_covariance_at: times/values size mismatch");
        if (sub.times.size() >= 2) used.push_back(&sub);
    }
    if (used.empty())
        throw NotEstimableError("smooth_covariance_at: no subject contributes off-diagonal pairs");
    double h_eff = h;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        std::optional<double> beta0 = direct_point(used, s, t, h_eff, kernel, used.size());
        if (beta0) return *beta0;
        h_eff *= 2.0;
    }
    throw NotEstimableError("smooth_covariance_at: not estimable at (" + std::to_string(s) + ", " +
                            std::to_string(t) + ") even after widening the window");
}

EigenSystem eigendecompose(const CovarianceSurface& surface, std::size_t n_components) {
    const std::size_t G = surface.grid_size();
    if (n_components < 1 || n_components > G)
        throw InvalidParameterError("eigendecompose: component count must lie in [1, G]");

    const auto w = grid::trapezoid_weights(G);
    Eigen::VectorXd sqrt_w(G);
    for (std::size_t j = 0; j < G; ++j) sqrt_w(j) = std::sqrt(w[j]);

    Eigen::MatrixXd B = sqrt_w.asDiagonal() * surface.values() * sqrt_w.asDiagonal();
    B = ((B + B.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecompose: eigensolver failed to converge");

    EigenSystem sys;
    sys.grid_size = G;
    sys.eigenvalues.resize(n_components);
    sys.functions.resize(static_cast<Eigen::Index>(n_components), static_cast<Eigen::Index>(G));
    for (std::size_t k = 0; k < n_components; ++k) {
        const Eigen::Index src = static_cast<Eigen::Index>(G - 1 - k);  // descending order
        double lambda = es.eigenvalues()(src);
        Eigen::VectorXd phi = es.eigenvectors().col(src).cwiseQuotient(sqrt_w);
        double integral = 0.0;
        for (std::size_t j = 0; j < G; ++j) integral += phi(static_cast<Eigen::Index>(j)) * w[j];
        bool flip = integral < -1e-9 ||
                    (std::fabs(integral) <= 1e-9 && phi(0) < 0.0);
        if (flip) phi = -phi;
        sys.eigenvalues[k] = std::max(lambda, 0.0);
        sys.functions.row(static_cast<Eigen::Index>(k)) = phi.transpose();
    }

    // Orthonormality of the retained rows under the trapezoid inner product.
    double residual = 0.0;
    for (std::size_t a = 0; a < n_components; ++a) {
        for (std::size_t b = a; b < n_components; ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < G; ++j)
                dot += sys.functions(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) *
                       sys.functions(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) *
                       w[j];
            residual = std::max(residual, std::fabs(dot - (a == b ? 1.0 : 0.0)));
        }
    }
    sys.ortho_residual = residual;
    if (residual > 1e-8)
        throw NumericalError("eigendecompose: orthonormality residual " + std::to_string(residual) +
                             " exceeds 1e-8");
    return sys;
}

std::vector<double> dense_scores(const SubjectValues& subject, const EigenSystem& eig,
                                 std::size_t n_scores) {
    if (subject.times.empty() || subject.times.size() != subject.values.size())
        throw InvalidInputError("dense_scores: subject needs matching non-empty times/values");
    if (n_scores < 1 || n_scores > eig.count())
        throw InvalidParameterError("dense_scores: score count out of range");
    const double inv_n = 1.0 / static_cast<double>(subject.times.size());
    std::vector<double> scores(n_scores, 0.0);
    for (std::size_t k = 0; k < n_scores; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < subject.times.size(); ++j)
            acc += subject.values[j] * eig.eval(k, subject.times[j]);
        scores[k] = acc * inv_n;
    }
    return scores;
}

std::vector<double> pace_scores(const SubjectValues& subject, const EigenSystem& eig,
                                const CovarianceSurface& surface, std::size_t n_scores,
                                double ridge) {
    const std::size_t N = subject.times.size();
    if (N == 0 || subject.values.size() != N)
        throw InvalidInputError("pace_scores: subject needs matching non-empty times/values");
    if (n_scores < 1 || n_scores > eig.count())
        throw InvalidParameterError("pace_scores: score count out of range");

    // Canonical time order makes the scores exactly invariant under
    // permutations of the observation list.
    std::vector<std::size_t> order(N);
    for (std::size_t j = 0; j < N; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return subject.times[a] < subject.times[b];
    });
    std::vector<double> times(N), values(N);
    for (std::size_t j = 0; j < N; ++j) {
        times[j] = subject.times[order[j]];
        values[j] = subject.values[order[j]];
        if (j > 0 && times[j] == times[j - 1])
            throw InvalidInputError("pace_scores: duplicate observation times");
    }

    bool all_zero =
        std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
    if (all_zero) return std::vector<double>(n_scores, 0.0);

    Eigen::MatrixXd sigma(N, N);
    for (std::size_t l = 0; l < N; ++l)
        for (std::size_t j = 0; j < N; ++j)
            sigma(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
                surface(times[l], times[j]);
    sigma = ((sigma + sigma.transpose()) * 0.5).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    if (es.info() != Eigen::Success)
        throw ConditioningError("pace_scores: eigensolver failed on the subject covariance");
    auto abs_extremes = [&](const Eigen::VectorXd& lambda) {
        double lo = std::fabs(lambda(0)), hi = std::fabs(lambda(0));
        for (Eigen::Index k = 1; k < lambda.size(); ++k) {
            lo = std::min(lo, std::fabs(lambda(k)));
            hi = std::max(hi, std::fabs(lambda(k)));
        }
        return std::pair<double, double>{lo, hi};
    };
    auto [abs_min, abs_max] = abs_extremes(es.eigenvalues());
    if (!(abs_max > 0.0))
        throw ConditioningError("pace_scores: subject covariance is zero");
    if (abs_min <= abs_max * 1e-12) {
        double delta = ridge * sigma.trace() / static_cast<double>(N);
        if (!(delta > 0.0))
            throw ConditioningError("pace_scores: subject covariance is singular beyond repair");
        sigma.diagonal().array() += delta;
        es.compute(sigma);
        std::tie(abs_min, abs_max) = abs_extremes(es.eigenvalues());
        if (!(abs_max > 0.0) || abs_min <= abs_max * 1e-12)
            throw ConditioningError("pace_scores: subject covariance is singular beyond repair");
    }

    Eigen::VectorXd z(N);
    for (std::size_t j = 0; j < N; ++j) z(static_cast<Eigen::Index>(j)) = values[j];
    // Spectral solve; handles indefinite smoothed surfaces as well.
    Eigen::VectorXd x = es.eigenvectors() *
                        (es.eigenvectors().transpose() * z).cwiseQuotient(es.eigenvalues());
    if (!x.allFinite())
        throw ConditioningError("pace_scores: linear solve produced non-finite values");

    std::vector<double> scores(n_scores, 0.0);
    for (std::size_t l = 0; l < n_scores; ++l) {
        double acc = 0.0;
        for (std::size_t j = 0; j < N; ++j)
            acc += eig.eval(l, times[j]) * x(static_cast<Eigen::Index>(j));
        scores[l] = eig.eigenvalues[l] * acc;
    }
    return scores;
}

}  // namespace otproc
