#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "otproc/errors.hpp"
#include "otproc/special.hpp"

using namespace otproc;

// Reference values computed with a 30-digit independent implementation of the
// regularized incomplete beta (root finds for the quantiles).
TEST_CASE("regularized incomplete beta: spot values") {
    CHECK(reg_incomplete_beta(0.3, 3.5, 1.5) == doctest::Approx(0.03012977992774084).epsilon(1e-12));
    CHECK(reg_incomplete_beta(0.7, 3.5, 1.5) == doctest::Approx(0.44707961346848356).epsilon(1e-12));
    CHECK(reg_incomplete_beta(0.5, 2.0, 2.0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(reg_incomplete_beta(0.2, 5.0, 1.0) == doctest::Approx(0.00032).epsilon(1e-12));
    CHECK(reg_incomplete_beta(0.0, 2.0, 3.0) == 0.0);
    CHECK(reg_incomplete_beta(1.0, 2.0, 3.0) == 1.0);
}

TEST_CASE("regularized incomplete beta: symmetry I_x(a,b) = 1 - I_{1-x}(b,a)") {
    for (double x : {0.1, 0.35, 0.62, 0.9}) {
        double lhs = reg_incomplete_beta(x, 3.5, 1.5);
        double rhs = 1.0 - reg_incomplete_beta(1.0 - x, 1.5, 3.5);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("beta quantile: high-precision reference values") {
    CHECK(beta_quantile(0.5, 3.5, 1.5) == doctest::Approx(0.72819325739721438).epsilon(1e-9));
    CHECK(beta_quantile(0.25, 3.5, 1.5) == doctest::Approx(0.57609439628852709).epsilon(1e-9));
    CHECK(beta_quantile(0.75, 3.5, 1.5) == doctest::Approx(0.85008691049428418).epsilon(1e-9));
    CHECK(beta_quantile(0.5, 2.0, 5.0) == doctest::Approx(0.26444998329565996).epsilon(1e-9));
    CHECK(beta_quantile(0.0, 3.5, 1.5) == 0.0);
    CHECK(beta_quantile(1.0, 3.5, 1.5) == 1.0);
}

TEST_CASE("beta quantile: inverse of the CDF") {
    for (double p : {0.05, 0.3, 0.5, 0.77, 0.99}) {
        double q = beta_quantile(p, 3.5, 1.5);
        CHECK(reg_incomplete_beta(q, 3.5, 1.5) == doctest::Approx(p).epsilon(1e-8));
    }
}

TEST_CASE("special function parameter validation") {
    CHECK_THROWS_AS(reg_incomplete_beta(0.5, -1.0, 2.0), InvalidParameterError);
    CHECK_THROWS_AS(reg_incomplete_beta(1.5, 1.0, 2.0), InvalidParameterError);
    CHECK_THROWS_AS(beta_quantile(1.5, 1.0, 2.0), InvalidParameterError);
}
