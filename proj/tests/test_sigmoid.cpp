#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cortexlift/sigmoid.hpp"

using namespace cortexlift;

TEST_CASE("saturating nonlinearity clips at unit level") {
    CHECK(sigmoid(0.0, 5.0) == 0.0);
    CHECK(sigmoid(0.1, 5.0) == 0.5);
    CHECK(sigmoid(0.2, 5.0) == 1.0);
    CHECK(sigmoid(0.7, 5.0) == 1.0);
    CHECK(sigmoid(-0.1, 5.0) == -0.5);
    CHECK(sigmoid(-3.0, 5.0) == -1.0);
    CHECK(sigmoid(0.25, 2.0) == 0.5);
}

TEST_CASE("primitive matches its closed branches") {
    CHECK(sigmoid_primitive(0.0, 5.0) == 0.0);
    CHECK_THAT(sigmoid_primitive(0.1, 5.0), Catch::Matchers::WithinAbs(0.025, 1e-15));
    // outside the linear zone: |rho| - 1/(2 alpha)
    CHECK_THAT(sigmoid_primitive(1.0, 5.0), Catch::Matchers::WithinAbs(0.9, 1e-15));
    CHECK_THAT(sigmoid_primitive(-1.0, 5.0), Catch::Matchers::WithinAbs(0.9, 1e-15));
    // continuity at the junction
    CHECK_THAT(sigmoid_primitive(0.2, 5.0), Catch::Matchers::WithinAbs(0.1, 1e-15));
}

TEST_CASE("primitive differentiates back to the nonlinearity") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
        const double rho = uni(rng);
        const double fd =
            (sigmoid_primitive(rho + h, 5.0) - sigmoid_primitive(rho - h, 5.0)) / (2 * h);
        CHECK_THAT(fd, Catch::Matchers::WithinAbs(sigmoid(rho, 5.0), 1e-6));
    }
}

TEST_CASE("polynomial fit is odd and tracks the target") {
    const OddPolyFit fit = fit_sigmoid_poly(2.8, 1.0, 11);
    REQUIRE(fit.coeff.size() == 12);
    for (int j = 0; j <= 11; j += 2) CHECK(fit.coeff[j] == 0.0);
    for (double t : {0.13, 0.51, 0.88}) CHECK(fit.eval(-t) == -fit.eval(t));
    // sup error twice checked: stored value honest, and pointwise agreement
    double sup = 0;
    for (int i = 0; i <= 2000; ++i) {
        const double t = i / 2000.0;
        sup = std::max(sup, std::abs(fit.eval(t) - sigmoid(t, 2.8)));
    }
    CHECK_THAT(fit.sup_err, Catch::Matchers::WithinAbs(sup, 1e-6));
    CHECK(sup < 0.2);
}

TEST_CASE("fit error shrinks with degree in the mildly saturated regime") {
    const double alpha = 2.8, B = 0.5;
    const OddPolyFit lo = fit_sigmoid_poly(alpha, B, 11);
    const OddPolyFit hi = fit_sigmoid_poly(alpha, B, 17);
    CHECK(hi.sup_err < lo.sup_err);
    CHECK(lo.sup_err < 0.05);
}

TEST_CASE("sub-saturated fits are exactly linear") {
    // with alpha*B <= 1 the target is a straight line through the origin
    const OddPolyFit fit = fit_sigmoid_poly(2.0, 0.5, 7);
    CHECK_THAT(fit.coeff[1], Catch::Matchers::WithinAbs(2.0, 1e-9));
    for (int j = 3; j <= 7; j += 2)
        CHECK_THAT(fit.coeff[j], Catch::Matchers::WithinAbs(0.0, 1e-8));
    CHECK(fit.sup_err < 1e-10);
}

TEST_CASE("fit rejects invalid shapes") {
    CHECK_THROWS(fit_sigmoid_poly(5.0, 1.0, 10));
    CHECK_THROWS(fit_sigmoid_poly(5.0, 0.0, 11));
    CHECK_THROWS(fit_sigmoid_poly(5.0, -2.0, 11));
}
