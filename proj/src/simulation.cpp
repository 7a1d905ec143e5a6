#include "otproc/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "otproc/errors.hpp"
#include "otproc/grid.hpp"
#include "otproc/special.hpp"
#include "otproc/warnings.hpp"

namespace otproc {

void SimConfig::validate() const {
    if (n == 0 || N == 0) throw ConfigError("simulation: n and N must be positive");
    if (reps == 0) throw ConfigError("simulation: reps must be >= 1");
    if (k_gen == 0) throw ConfigError("simulation: k_gen must be positive");
    if (quantile_grid < 2 || time_grid < 2)
        throw ConfigError("simulation: grids must have size >= 2");
    if (eval_points < 2) throw ConfigError("simulation: eval_points must be >= 2");
    if (!(kappa > 0.0)) throw ConfigError("simulation: kappa must be > 0");
    if (N < 2) throw ConfigError("simulation: N must be >= 2 for the dense pipeline");
}

double generator_basis(std::size_t k, double x) {
    if (k == 1) return 1.0;
    return std::cos(2.0 * static_cast<double>(k - 1) * std::numbers::pi * x);
}

double truth_z(const SubjectTruth& subject, double t) {
    double z = 0.0;
    for (std::size_t k = 0; k < subject.xi.size(); ++k)
        z += subject.xi[k] * generator_basis(k + 1, t);
    return z;
}

TransportMap truth_transport(const SubjectTruth& subject, double t, const LinkFunction& link) {
    const double u_mult = link.forward(truth_z(subject, t));
    const std::size_t m = subject.t0.grid_size();
    std::vector<double> v(m);
    if (u_mult >= 0.0) {
        for (std::size_t j = 0; j < m; ++j) {
            double u = grid::point(j, m);
            v[j] = u + u_mult * (subject.t0.tvals()[j] - u);
        }
    } else {
        for (std::size_t j = 0; j < m; ++j) {
            double u = grid::point(j, m);
            v[j] = u + u_mult * (u - subject.t0_inverse.tvals()[j]);
        }
    }
    return TransportMap::sanitized(std::move(v));
}

GeneratedData generate_truth(const SimConfig& config, Rng& rng) {
    config.validate();
    const std::size_t M = config.quantile_grid;

    GeneratedData out;
    out.truth.resize(config.n);
    out.observed.resize(config.n);

    // Draw order per subject: (a, b), xi_1..xi_K, times, then sample draws.
    std::vector<double> raw_norms(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        SubjectTruth& truth = out.truth[i];
        double a = rng.uniform(3.0, 4.0);
        double b = rng.uniform(1.0, 2.0);
        truth.xi.resize(config.k_gen);
        for (std::size_t k = 0; k < config.k_gen; ++k)
            truth.xi[k] = rng.normal() / static_cast<double>(k + 1);

        std::vector<double> q(M);
        for (std::size_t j = 0; j < M; ++j) q[j] = beta_quantile(grid::point(j, M), a, b);
        truth.t0 = TransportMap::sanitized(std::move(q));
        raw_norms[i] = norm1(truth.t0);
    }

    double target = config.baseline_norm;
    if (!(target > 0.0)) {
        target = 0.0;
        for (double v : raw_norms) target += v;
        target /= static_cast<double>(config.n);
    }
    out.common_norm = target;
    for (std::size_t i = 0; i < config.n; ++i) {
        SubjectTruth& truth = out.truth[i];
        RescaledBaseline r = rescale_baseline(truth.t0, target);
        truth.t0 = r.map;
        truth.norm_t0 = r.kappa_used;
        truth.t0_inverse = invert(truth.t0);
    }

    for (std::size_t i = 0; i < config.n; ++i) {
        TransportSeries& series = out.observed[i];
        series.id = "s" + std::to_string(i + 1);
        series.times.resize(config.N);
        if (config.design == Design::random) {
            for (std::size_t j = 0; j < config.N; ++j) {
                double t = rng.uniform();
                // Times within a subject must be distinct.
                while (std::find(series.times.begin(), series.times.begin() + j, t) !=
                       series.times.begin() + j)
                    t = rng.uniform();
                series.times[j] = t;
            }
        } else {
            for (std::size_t j = 0; j < config.N; ++j)
                series.times[j] = (2.0 * static_cast<double>(j) + 1.0) /
                                  (2.0 * static_cast<double>(config.N));
        }
        series.transports.reserve(config.N);
        for (std::size_t j = 0; j < config.N; ++j) {
            TransportMap exact = truth_transport(out.truth[i], series.times[j], config.link);
            if (config.m == 0) {
                series.transports.push_back(std::move(exact));
                continue;
            }
            std::vector<double> samples(config.m);
            for (std::size_t k = 0; k < config.m; ++k) samples[k] = exact(rng.uniform());
            series.transports.push_back(
                measure_to_transport(empirical_quantile(samples, M)));
        }
    }
    return out;
}

double imse(const std::vector<SubjectTruth>& truth,
            const std::function<TransportMap(std::size_t, double)>& predict,
            const LinkFunction& link, std::size_t eval_points) {
    if (truth.empty()) throw InvalidInputError("imse: empty truth");
    const auto times = grid::points(eval_points);
    double total = 0.0;
    std::vector<double> integrand(eval_points);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (std::size_t j = 0; j < eval_points; ++j) {
            TransportMap predicted = predict(i, times[j]);
            TransportMap expected = truth_transport(truth[i], times[j], link);
            integrand[j] = transport_distance(predicted, expected, 1.0);
        }
        total += grid::trapezoid(integrand);
    }
    return total / static_cast<double>(truth.size());
}

ImseResult run_study(const SimConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    ImseResult result;
    result.config = config;
    result.rng_algorithm = Rng::kAlgorithm;
    result.per_rep.assign(config.reps, std::numeric_limits<double>::quiet_NaN());

    auto run_rep = [&](std::size_t rep) {
        Rng rng = Rng::substream(config.seed, rep);
        GeneratedData data = generate_truth(config, rng);
        DenseConfig dense{config.kappa, config.bandwidth, config.kernel, config.time_grid,
                          config.n_components};
        FittedDenseModel model = fit_dense(data.observed, dense);
        return imse(
            data.truth,
            [&](std::size_t i, double t) { return predict_dense(model, data.observed[i].id, t); },
            config.link, config.eval_points);
    };

    std::size_t n_threads = config.threads > 0
                                ? config.threads
                                : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    n_threads = std::min<std::size_t>(n_threads, config.reps);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t rep = next.fetch_add(1); rep < config.reps; rep = next.fetch_add(1)) {
            try {
                result.per_rep[rep] = run_rep(rep);
            } catch (const Error& e) {
                warn("run_study: replication " + std::to_string(rep) + " failed: " + e.what());
            }
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t w = 0; w < n_threads; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    double sum = 0.0;
    std::size_t ok = 0;
    for (double v : result.per_rep) {
        if (std::isfinite(v)) {
            sum += v;
            ++ok;
        }
    }
    result.failures = config.reps - ok;
    if (result.failures * 10 > config.reps)
        throw NumericalError("run_study: more than 10% of replications failed (" +
                             std::to_string(result.failures) + "/" +
                             std::to_string(config.reps) + ")");
    result.mean = sum / static_cast<double>(ok);
    if (ok > 1) {
        double ss = 0.0;
        for (double v : result.per_rep) {
            if (!std::isfinite(v)) continue;
            double d = v - result.mean;
            ss += d * d;
        }
        result.sd = std::sqrt(ss / static_cast<double>(ok - 1));
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace otproc
