#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "otproc/errors.hpp"
#include "otproc/grid.hpp"
#include "otproc/grid_measure.hpp"
#include "otproc/rng.hpp"
#include "otproc/transport_map.hpp"

using namespace otproc;

namespace {

// Random full-support quantile function: smoothed exponential increments.
GridMeasure random_measure(Rng& rng, std::size_t m) {
    std::vector<double> inc(m - 1);
    for (double& x : inc) x = -std::log(1.0 - rng.uniform());
    std::vector<double> smooth(m - 1);
    for (std::size_t j = 0; j < inc.size(); ++j) {
        double acc = 0.0;
        int count = 0;
        for (int k = -3; k <= 3; ++k) {
            long idx = static_cast<long>(j) + k;
            if (idx < 0 || idx >= static_cast<long>(inc.size())) continue;
            acc += inc[static_cast<std::size_t>(idx)];
            ++count;
        }
        smooth[j] = acc / count;
    }
    std::vector<double> q(m, 0.0);
    for (std::size_t j = 1; j < m; ++j) q[j] = q[j - 1] + smooth[j - 1];
    for (double& x : q) x /= q.back();
    q.back() = 1.0;
    return GridMeasure::sanitized(std::move(q));
}

}  // namespace

TEST_CASE("empirical quantile: single atom is constant") {
    std::vector<double> samples{0.3};
    GridMeasure q = empirical_quantile(samples, 3);
    CHECK(q.qvals() == std::vector<double>{0.3, 0.3, 0.3});
}

TEST_CASE("empirical quantile: two-point sample interpolates order statistics") {
    std::vector<double> samples{0.0, 1.0};
    GridMeasure q = empirical_quantile(samples, 3);
    CHECK(q.qvals()[0] == 0.0);
    CHECK(q.qvals()[1] == doctest::Approx(0.5));
    CHECK(q.qvals()[2] == 1.0);
}

TEST_CASE("empirical quantile: uniform draws stay close to the diagonal") {
    Rng rng(20240817);
    std::vector<double> samples(10000);
    for (double& x : samples) x = rng.uniform();
    GridMeasure q = empirical_quantile(samples, 101);
    double sup = 0.0;
    for (std::size_t j = 0; j < 101; ++j)
        sup = std::max(sup, std::fabs(q.qvals()[j] - grid::point(j, 101)));
    CHECK(sup < 0.05);  // DKW-style bound, ~1.36/sqrt(m) typical deviation
}

TEST_CASE("empirical quantile: permutation invariance and errors") {
    std::vector<double> a{0.2, 0.8, 0.5, 0.4};
    std::vector<double> b{0.8, 0.4, 0.2, 0.5};
    CHECK(empirical_quantile(a, 11).qvals() == empirical_quantile(b, 11).qvals());
    CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 11), InvalidInputError);
    CHECK_THROWS_AS(empirical_quantile(std::vector<double>{1.2}, 11), DomainError);
    CHECK_THROWS_AS(empirical_quantile(a, 1), InvalidParameterError);
}

TEST_CASE("wasserstein distance: analytic values for u vs u^2") {
    const std::size_t m = 1001;
    GridMeasure uniform = GridMeasure::uniform(m);
    std::vector<double> q(m);
    for (std::size_t j = 0; j < m; ++j) {
        double p = grid::point(j, m);
        q[j] = p * p;
    }
    GridMeasure squared(q);
    // integral of (u - u^2) = 1/6; integral of (u - u^2)^2 = 1/30.
    CHECK(wasserstein_distance(uniform, squared, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-4));
    CHECK(wasserstein_distance(uniform, squared, 2.0) ==
          doctest::Approx(std::sqrt(1.0 / 30.0)).epsilon(1e-4));
    CHECK(wasserstein_distance(uniform, uniform, 2.0) == 0.0);
}

TEST_CASE("wasserstein distance: errors") {
    GridMeasure a = GridMeasure::uniform(11);
    GridMeasure b = GridMeasure::uniform(21);
    CHECK_THROWS_AS(wasserstein_distance(a, b, 1.0), IncompatibleGridError);
    CHECK_THROWS_AS(wasserstein_distance(a, a, 0.5), InvalidParameterError);
}

TEST_CASE("wasserstein distance: symmetry and triangle inequality on random triples") {
    Rng rng(7);
    const std::size_t m = 101;
    for (int trial = 0; trial < 25; ++trial) {
        GridMeasure a = random_measure(rng, m);
        GridMeasure b = random_measure(rng, m);
        GridMeasure c = random_measure(rng, m);
        for (double p : {1.0, 2.0}) {
            double ab = wasserstein_distance(a, b, p);
            double ba = wasserstein_distance(b, a, p);
            double ac = wasserstein_distance(a, c, p);
            double cb = wasserstein_distance(c, b, p);
            CHECK(std::fabs(ab - ba) < 1e-10);
            CHECK(ab <= ac + cb + 1e-10);
        }
    }
}

TEST_CASE("push_forward: identity map leaves measures unchanged") {
    Rng rng(11);
    GridMeasure a = random_measure(rng, 101);
    GridMeasure out = push_forward(TransportMap::identity(101), a);
    for (std::size_t j = 0; j < 101; ++j)
        CHECK(out.qvals()[j] == doctest::Approx(a.qvals()[j]).epsilon(1e-14));
}

TEST_CASE("push_forward: uniform base gives the map itself") {
    const std::size_t m = 101;
    std::vector<double> t(m);
    for (std::size_t j = 0; j < m; ++j) {
        double u = grid::point(j, m);
        t[j] = u * u;
    }
    TransportMap map(t);
    GridMeasure out = push_forward(map, GridMeasure::uniform(m));
    for (std::size_t j = 0; j < m; ++j)
        CHECK(out.qvals()[j] == doctest::Approx(t[j]).epsilon(1e-14));
}

TEST_CASE("push_forward: analytic composition T(u)=u^2 on sqrt quantiles") {
    const std::size_t m = 201;
    std::vector<double> t(m), q(m);
    for (std::size_t j = 0; j < m; ++j) {
        double u = grid::point(j, m);
        t[j] = u * u;
        q[j] = std::sqrt(u);
    }
    GridMeasure out = push_forward(TransportMap(t), GridMeasure(q));
    for (std::size_t j = 0; j < m; ++j)
        CHECK(out.qvals()[j] == doctest::Approx(grid::point(j, m)).epsilon(1e-3));
}

TEST_CASE("measure/transport isometry") {
    const std::size_t m = 101;
    CHECK(measure_to_transport(GridMeasure::uniform(m)).tvals() == grid::points(m));
    CHECK(transport_to_measure(TransportMap::identity(m)).qvals() == grid::points(m));

    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        GridMeasure a = random_measure(rng, m);
        GridMeasure b = random_measure(rng, m);
        double direct = wasserstein_distance(a, b, 2.0);
        double lifted = transport_distance(measure_to_transport(a), measure_to_transport(b), 2.0);
        CHECK(std::fabs(direct - lifted) < 1e-12);
    }
}

TEST_CASE("round trip measure -> transport -> measure") {
    Rng rng(17);
    GridMeasure a = random_measure(rng, 101);  // pinned endpoints by construction
    GridMeasure back = transport_to_measure(measure_to_transport(a));
    CHECK(back.qvals() == a.qvals());
}

TEST_CASE("GridMeasure validation") {
    CHECK_THROWS_AS(GridMeasure(std::vector<double>{0.5, 0.4}), InvalidInputError);
    CHECK_THROWS_AS(GridMeasure(std::vector<double>{0.0, 1.5}), DomainError);
    CHECK_THROWS_AS(GridMeasure(std::vector<double>{0.3}), InvalidInputError);
}
