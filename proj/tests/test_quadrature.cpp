#include "doctest.h"

#include <cmath>

#include "dwad/errors.hpp"
#include "dwad/quadrature.hpp"

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005;

double double_factorial_odd(int m) {  // (2m - 1)!!
    double v = 1.0;
    for (int k = 2 * m - 1; k > 1; k -= 2) v *= k;
    return v;
}

}  // namespace

TEST_CASE("gauss-hermite rule: symmetry, positivity, total mass") {
    for (int n : {8, 24, 96, 384}) {
        const auto& rule = dwad::gauss_hermite(n);
        REQUIRE(rule.node.size() == n);
        REQUIRE(rule.weight.size() == n);
        CHECK(rule.weight.minCoeff() > 0.0);
        CHECK(rule.weight.sum() == doctest::Approx(kSqrt2Pi).epsilon(1e-14));
        for (int i = 0; i + 1 < n; ++i) CHECK(rule.node[i] < rule.node[i + 1]);
        // Nodes and weights are symmetric about zero.
        for (int i = 0; i < n; ++i) {
            CHECK(rule.node[i] == doctest::Approx(-rule.node[n - 1 - i]).epsilon(1e-13));
            CHECK(rule.weight[i] == doctest::Approx(rule.weight[n - 1 - i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("gauss-hermite cache returns a stable reference") {
    const auto& a = dwad::gauss_hermite(48);
    const auto& b = dwad::gauss_hermite(48);
    CHECK(&a == &b);
}

TEST_CASE("polynomial exactness: even moments against the double factorial") {
    // int x^{2m} exp(-x^2/2) dx = (2m-1)!! sqrt(2 pi); a rule with n nodes is
    // exact through degree 2n-1.
    for (int m : {0, 1, 2, 5, 10}) {
        const double got = dwad::integrate_gauss(
            [m](const Eigen::VectorXd& x) { return std::pow(x[0], 2 * m); }, 1, 1e-12);
        const double want = double_factorial_odd(m) * kSqrt2Pi;
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
    // Odd moments vanish by symmetry.
    const double odd = dwad::integrate_gauss(
        [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[0]; }, 1, 1e-12);
    CHECK(std::abs(odd) < 1e-12);
}

TEST_CASE("oscillatory integrands against closed forms") {
    // int cos(kx) exp(-x^2/2) dx = sqrt(2 pi) exp(-k^2/2).
    const double c1 = dwad::integrate_gauss(
        [](const Eigen::VectorXd& x) { return std::cos(x[0]); }, 1, 1e-12);
    CHECK(c1 == doctest::Approx(kSqrt2Pi * std::exp(-0.5)).epsilon(1e-12));

    const double c3 = dwad::integrate_gauss(
        [](const Eigen::VectorXd& x) { return std::cos(3.0 * x[0]); }, 1, 1e-12);
    CHECK(c3 == doctest::Approx(kSqrt2Pi * std::exp(-4.5)).epsilon(1e-10));
}

TEST_CASE("two-dimensional tensor rule") {
    // int (x^2 + y^2) exp(-(x^2+y^2)/2) dx dy = 2 * (2 pi) = 4 pi.
    const double got = dwad::integrate_gauss(
        [](const Eigen::VectorXd& x) { return x.squaredNorm(); }, 2, 1e-12);
    CHECK(got == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
}

TEST_CASE("vector-valued driver integrates all components") {
    auto f = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd v(3);
        v << 1.0, x[0] * x[0], std::cos(x[0]);
        return v;
    };
    const Eigen::VectorXd got = dwad::integrate_gauss_vec(f, 1, 3, 1e-12);
    CHECK(got[0] == doctest::Approx(kSqrt2Pi).epsilon(1e-13));
    CHECK(got[1] == doctest::Approx(kSqrt2Pi).epsilon(1e-13));
    CHECK(got[2] == doctest::Approx(kSqrt2Pi * std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("refinement ladder exhaustion raises NumericalError") {
    // cos(40 x) needs far more than 8 nodes; with the ladder capped at 8 the
    // two levels (4, 8) cannot agree to 1e-10.
    auto f = [](const Eigen::VectorXd& x) { return std::cos(40.0 * x[0]); };
    CHECK_THROWS_AS(dwad::integrate_gauss(f, 1, 1e-10, 4, 8), dwad::NumericalError);
}

TEST_CASE("invalid dimension raises ConfigError") {
    auto f = [](const Eigen::VectorXd&) { return 1.0; };
    CHECK_THROWS_AS(dwad::integrate_gauss(f, 0), dwad::ConfigError);
}
