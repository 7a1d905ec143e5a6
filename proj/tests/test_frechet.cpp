#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "otproc/errors.hpp"
#include "otproc/frechet.hpp"
#include "otproc/grid.hpp"
#include "otproc/rng.hpp"

using namespace otproc;

namespace {

const std::size_t M = 101;

GridMeasure shifted_uniform(double delta_scale) {
    // q(p) = p + delta_scale * p (1 - p); monotone for |delta_scale| < 1.
    std::vector<double> q(M);
    for (std::size_t j = 0; j < M; ++j) {
        double p = grid::point(j, M);
        q[j] = p + delta_scale * p * (1.0 - p);
    }
    return GridMeasure::sanitized(std::move(q));
}

Panel measure_panel(const std::vector<std::vector<std::pair<double, GridMeasure>>>& data,
                    Design design) {
    Panel panel;
    panel.design = design;
    for (std::size_t i = 0; i < data.size(); ++i) {
        Subject s;
        s.id = "s" + std::to_string(i + 1);
        for (const auto& [t, mu] : data[i]) s.observations.push_back(Observation{t, mu});
        panel.subjects.push_back(std::move(s));
    }
    return panel;
}

}  // namespace

TEST_CASE("cross_sectional_mean: identical inputs and arithmetic mean") {
    GridMeasure a = shifted_uniform(0.4);
    GridMeasure mean_same = cross_sectional_mean({a, a, a});
    for (std::size_t j = 0; j < M; ++j)
        CHECK(mean_same.qvals()[j] == doctest::Approx(a.qvals()[j]).epsilon(1e-15));

    std::vector<double> pj(M), pj2(M);
    for (std::size_t j = 0; j < M; ++j) {
        double p = grid::point(j, M);
        pj[j] = p;
        pj2[j] = p * p;
    }
    GridMeasure mean2 = cross_sectional_mean({GridMeasure(pj), GridMeasure(pj2)});
    for (std::size_t j = 0; j < M; ++j)
        CHECK(mean2.qvals()[j] == doctest::Approx(0.5 * (pj[j] + pj2[j])).epsilon(1e-15));

    CHECK_THROWS_AS(cross_sectional_mean({}), InvalidInputError);
}

TEST_CASE("cross_sectional_mean: reflection pair averages to uniform") {
    GridMeasure up = shifted_uniform(0.3);
    GridMeasure down = shifted_uniform(-0.3);
    GridMeasure mean = cross_sectional_mean({up, down});
    for (std::size_t j = 0; j < M; ++j)
        CHECK(mean.qvals()[j] == doctest::Approx(grid::point(j, M)).epsilon(1e-14));
}

TEST_CASE("cross_sectional_mean commutes with the transport isometry") {
    Rng rng(5);
    std::vector<GridMeasure> measures;
    std::vector<TransportMap> transports;
    for (int i = 0; i < 4; ++i) {
        GridMeasure mu = shifted_uniform(0.1 + 0.15 * i);
        measures.push_back(mu);
        transports.push_back(measure_to_transport(mu));
    }
    GridMeasure mean_then_lift = cross_sectional_mean(measures);
    TransportMap lift_then_mean = mean_transport(transports);
    for (std::size_t j = 0; j < M; ++j)
        CHECK(std::fabs(measure_to_transport(mean_then_lift).tvals()[j] -
                        lift_then_mean.tvals()[j]) <= 2.0 / (M - 1));
}

TEST_CASE("local_frechet_weights: moment conditions hold") {
    Rng rng(11);
    std::vector<std::vector<std::pair<double, GridMeasure>>> data(6);
    for (auto& subject : data)
        for (int j = 0; j < 5; ++j)
            subject.emplace_back(rng.uniform(), shifted_uniform(rng.uniform(-0.5, 0.5)));
    Panel panel = measure_panel(data, Design::random);

    for (double t : {0.1, 0.5, 0.9}) {
        LocalLinearWeights w = local_frechet_weights(panel, t, 0.3, KernelSpec{});
        double sum = 0.0, moment = 0.0;
        for (std::size_t i = 0; i < panel.subjects.size(); ++i)
            for (std::size_t j = 0; j < panel.subjects[i].observations.size(); ++j) {
                sum += w.per_subject[i][j];
                moment += w.per_subject[i][j] * (panel.subjects[i].observations[j].time - t);
            }
        CHECK(std::fabs(sum - 1.0) < 1e-10);
        CHECK(std::fabs(moment) < 1e-10);
    }
}

TEST_CASE("local_frechet_mean: constant payloads reproduce the payload") {
    GridMeasure mu = shifted_uniform(0.35);
    std::vector<std::vector<std::pair<double, GridMeasure>>> data(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j)
            data[i].emplace_back((j + 0.5 + 0.05 * static_cast<double>(i)) / 7.0, mu);
    Panel panel = measure_panel(data, Design::random);
    for (double t : {0.2, 0.5, 0.8}) {
        GridMeasure out = local_frechet_mean(panel, t, 0.25);
        for (std::size_t j = 0; j < M; ++j)
            CHECK(out.qvals()[j] == doctest::Approx(mu.qvals()[j]).epsilon(1e-10));
    }
}

TEST_CASE("local_frechet_mean: linear quantile trend, checked against a per-level WLS oracle") {
    // Quantiles linear in time: q_t(p) = p + (0.1 + 0.2 t) p (1 - p).
    auto measure_at = [](double t) { return shifted_uniform(0.1 + 0.2 * t); };
    Rng rng(13);
    std::vector<std::vector<std::pair<double, GridMeasure>>> data(8);
    for (auto& subject : data)
        for (int j = 0; j < 7; ++j) {
            double t = rng.uniform();
            subject.emplace_back(t, measure_at(t));
        }
    Panel panel = measure_panel(data, Design::random);

    const double h = 0.2;
    const double t0 = 0.45;
    GridMeasure fitted = local_frechet_mean(panel, t0, h);

    // Local-linear fits reproduce linear trends up to O(h^2); here the trend
    // is exactly linear per level, so the fit matches the truth to roundoff.
    GridMeasure expected = measure_at(t0);
    for (std::size_t j = 0; j < M; ++j)
        CHECK(fitted.qvals()[j] == doctest::Approx(expected.qvals()[j]).epsilon(1e-9));

    // Independent oracle: per quantile level, solve the subject-weighted local
    // linear regression (2x2 normal equations) and take the intercept.
    KernelSpec kernel{};
    const std::size_t n = panel.subjects.size();
    for (std::size_t level : {std::size_t{10}, std::size_t{50}, std::size_t{90}}) {
        double s0 = 0, s1 = 0, s2 = 0, b0 = 0, b1 = 0;
        for (const Subject& s : panel.subjects) {
            double wsub = 1.0 / (static_cast<double>(n) * s.observations.size());
            for (const Observation& o : s.observations) {
                double d = o.time - t0;
                double k = wsub * kernel.scaled(d, h);
                double y = std::get<GridMeasure>(o.payload).qvals()[level];
                s0 += k;
                s1 += k * d;
                s2 += k * d * d;
                b0 += k * y;
                b1 += k * d * y;
            }
        }
        double det = s0 * s2 - s1 * s1;
        double intercept = (s2 * b0 - s1 * b1) / det;
        CHECK(fitted.qvals()[level] == doctest::Approx(intercept).epsilon(1e-10));
    }
}

TEST_CASE("local_frechet_mean: huge bandwidth approaches the cross-sectional mean") {
    std::vector<std::vector<std::pair<double, GridMeasure>>> data(5);
    std::vector<GridMeasure> all;
    // Symmetric time design around 0.5 so the global linear fit has zero slope.
    for (std::size_t i = 0; i < 5; ++i) {
        double scale = -0.4 + 0.2 * static_cast<double>(i);
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            data[i].emplace_back(t, shifted_uniform(scale));
            all.push_back(shifted_uniform(scale));
        }
    }
    Panel panel = measure_panel(data, Design::random);
    GridMeasure wide = local_frechet_mean(panel, 0.5, 10.0);
    GridMeasure pooled = cross_sectional_mean(all);
    for (std::size_t j = 0; j < M; ++j)
        CHECK(std::fabs(wide.qvals()[j] - pooled.qvals()[j]) < 1e-2);
}

TEST_CASE("local_frechet_mean: error paths") {
    std::vector<std::vector<std::pair<double, GridMeasure>>> data(2);
    data[0].emplace_back(0.5, shifted_uniform(0.2));
    data[1].emplace_back(0.5, shifted_uniform(-0.2));
    Panel panel = measure_panel(data, Design::random);
    // Only one distinct support time inside the window.
    CHECK_THROWS_AS(local_frechet_mean(panel, 0.5, 0.05), InsufficientDataError);
    CHECK_THROWS_AS(local_frechet_mean(panel, 0.5, -1.0), InvalidParameterError);
}

TEST_CASE("center_panel: payload equal to the barycenter gives identity transports") {
    GridMeasure mu = shifted_uniform(0.25);
    std::vector<std::vector<std::pair<double, GridMeasure>>> data(3);
    for (auto& subject : data)
        for (double t : {0.0, 0.5, 1.0}) subject.emplace_back(t, mu);
    Panel panel = measure_panel(data, Design::fixed);
    CenteredPanel centered = center_panel(panel, CenteringConfig{M, std::nullopt, {}, 51});
    for (const TransportSeries& series : centered.transports)
        for (const TransportMap& map : series.transports)
            for (std::size_t j = 0; j < M; ++j)
                CHECK(map.tvals()[j] == doctest::Approx(grid::point(j, M)).epsilon(1e-9));
    CHECK(centered.barycenter_times.size() == 3);
}

TEST_CASE("center_panel: symmetric pair gives near-inverse transports") {
    // Barycenter is uniform; payloads id +- delta with delta small enough that
    // (id+delta)^{-1} ~ id-delta within the stated 2/(M-1) tolerance.
    std::vector<double> qp(M), qm(M);
    for (std::size_t j = 0; j < M; ++j) {
        double p = grid::point(j, M);
        double delta = 0.05 * p * (1.0 - p);
        qp[j] = p + delta;
        qm[j] = p - delta;
    }
    std::vector<std::vector<std::pair<double, GridMeasure>>> data(2);
    for (double t : {0.25, 0.75}) {
        data[0].emplace_back(t, GridMeasure(qp));
        data[1].emplace_back(t, GridMeasure(qm));
    }
    Panel panel = measure_panel(data, Design::fixed);
    CenteredPanel centered = center_panel(panel, CenteringConfig{M, std::nullopt, {}, 51});
    for (std::size_t obs = 0; obs < 2; ++obs) {
        const TransportMap& plus = centered.transports[0].transports[obs];
        const TransportMap& minus = centered.transports[1].transports[obs];
        TransportMap inv_minus = invert(minus);
        for (std::size_t j = 0; j < M; ++j)
            CHECK(std::fabs(plus.tvals()[j] - inv_minus.tvals()[j]) <= 2.0 / (M - 1));
    }
}

TEST_CASE("center_panel: single subject centers to the identity; random design needs h") {
    // With one subject the barycenter is its own empirical measure, so the
    // transport is the identity regardless of the payload.
    Rng rng(21);
    std::vector<double> samples(200);
    for (double& x : samples) x = rng.uniform();
    Panel panel;
    panel.design = Design::fixed;
    Subject s;
    s.id = "s1";
    s.observations.push_back(Observation{0.5, samples});
    panel.subjects.push_back(s);
    CenteredPanel centered = center_panel(panel, CenteringConfig{M, std::nullopt, {}, 51});
    for (std::size_t j = 0; j < M; ++j)
        CHECK(std::fabs(centered.transports[0].transports[0].tvals()[j] - grid::point(j, M)) <
              1e-9);
    CHECK_THROWS_AS(center_panel(Panel{panel.subjects, Design::random},
                                 CenteringConfig{M, std::nullopt, {}, 51}),
                    ConfigError);
}

TEST_CASE("mean_transport: basic identities") {
    std::vector<double> t(M);
    for (std::size_t j = 0; j < M; ++j) {
        double u = grid::point(j, M);
        t[j] = u * u;
    }
    TransportMap sq(t);
    CHECK(mean_transport({sq}).tvals() == sq.tvals());

    TransportMap mean_with_id = mean_transport({TransportMap::identity(M), sq});
    TransportMap half = scalar_mult(0.5, sq);
    for (std::size_t j = 0; j < M; ++j)
        CHECK(mean_with_id.tvals()[j] == doctest::Approx(half.tvals()[j]).epsilon(1e-14));

    TransportMap mean_inv_pair = mean_transport({sq, invert(sq)});
    for (std::size_t j = 0; j < M; ++j) {
        double u = grid::point(j, M);
        double expected = 0.5 * (u * u + std::sqrt(u));
        CHECK(std::fabs(mean_inv_pair.tvals()[j] - expected) <= 2.0 / (M - 1));
    }

    CHECK_THROWS_AS(mean_transport({}), InvalidInputError);

    // Permutation invariance (up to summation-order roundoff).
    TransportMap a = scalar_mult(0.3, sq);
    TransportMap b = scalar_mult(0.9, sq);
    TransportMap m1 = mean_transport({a, b, sq});
    TransportMap m2 = mean_transport({sq, a, b});
    for (std::size_t j = 0; j < M; ++j)
        CHECK(m1.tvals()[j] == doctest::Approx(m2.tvals()[j]).epsilon(1e-14));
}
