#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "adfslam/core/cubature.hpp"
#include "support/oracles.hpp"

using adfslam::CubaturePointSet;
using adfslam::DimensionError;
using adfslam::GaussianState;
using adfslam::generate_cubature_points;
using adfslam::NumericError;
using adfslam::sigma_points;
using adfslam::transform_moments;

TEST_CASE("cubature points in 1D are +-1 with weight one half") {
    const auto rule = generate_cubature_points(1);
    REQUIRE(rule.count() == 2);
    CHECK(rule.unit_points(0, 0) == Catch::Approx(1.0));
    CHECK(rule.unit_points(0, 1) == Catch::Approx(-1.0));
    CHECK(rule.weights[0] == Catch::Approx(0.5));
    CHECK(rule.weights[1] == Catch::Approx(0.5));
}

TEST_CASE("cubature points in 2D are +-sqrt(2) on the axes") {
    const auto rule = generate_cubature_points(2);
    REQUIRE(rule.count() == 4);
    const double r = std::sqrt(2.0);
    CHECK((rule.unit_points.col(0) - Eigen::Vector2d(r, 0)).norm() < 1e-15);
    CHECK((rule.unit_points.col(1) - Eigen::Vector2d(0, r)).norm() < 1e-15);
    CHECK((rule.unit_points.col(2) - Eigen::Vector2d(-r, 0)).norm() < 1e-15);
    CHECK((rule.unit_points.col(3) - Eigen::Vector2d(0, -r)).norm() < 1e-15);
    CHECK(rule.weights.sum() == Catch::Approx(1.0));
    CHECK((rule.weights.array() == 0.25).all());
}

TEST_CASE("cubature rule reproduces zero mean and unit covariance") {
    for (Eigen::Index n : {1, 2, 3, 7, 12}) {
        const auto rule = generate_cubature_points(n);
        CHECK(rule.weights.sum() == Catch::Approx(1.0).margin(1e-12));
        const Eigen::VectorXd mean = rule.unit_points * rule.weights;
        CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::MatrixXd cov =
            rule.unit_points * rule.weights.asDiagonal() * rule.unit_points.transpose();
        CHECK((cov - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("zero dimension is rejected") {
    CHECK_THROWS_AS(generate_cubature_points(0), DimensionError);
}

TEST_CASE("sigma points of the unit Gaussian are the unit points") {
    GaussianState state(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
    const auto pts = sigma_points(state, generate_cubature_points(1));
    CHECK(pts(0, 0) == Catch::Approx(1.0));
    CHECK(pts(0, 1) == Catch::Approx(-1.0));
}

TEST_CASE("scalar sigma points scale by the standard deviation") {
    GaussianState state(Eigen::VectorXd::Constant(1, 3.0), Eigen::MatrixXd::Constant(1, 1, 4.0));
    const auto pts = sigma_points(state, generate_cubature_points(1));
    CHECK(pts(0, 0) == Catch::Approx(5.0));
    CHECK(pts(0, 1) == Catch::Approx(1.0));
}

TEST_CASE("diagonal covariance sigma points, hand-evaluated") {
    // L = diag(2, 3), xi = +-sqrt(2) e_i.
    GaussianState state(Eigen::VectorXd::Zero(2), Eigen::Vector2d(4.0, 9.0).asDiagonal());
    const auto pts = sigma_points(state, generate_cubature_points(2));
    const double r = std::sqrt(2.0);
    CHECK((pts.col(0) - Eigen::Vector2d(2 * r, 0)).norm() < 1e-12);
    CHECK((pts.col(1) - Eigen::Vector2d(0, 3 * r)).norm() < 1e-12);
    CHECK((pts.col(2) - Eigen::Vector2d(-2 * r, 0)).norm() < 1e-12);
    CHECK((pts.col(3) - Eigen::Vector2d(0, -3 * r)).norm() < 1e-12);
}

TEST_CASE("transform through the identity returns the input moments") {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd p = test_oracles::random_spd(4, rng);
    const Eigen::VectorXd m = test_oracles::random_vector(4, rng);
    GaussianState state(m, p);
    const auto moments = transform_moments([](const Eigen::VectorXd& x) { return x; }, state);
    CHECK((moments.mean - m).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((moments.cov - p).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((moments.cross_cov - p).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transform is exact on affine maps") {
    std::mt19937_64 rng(12);
    const Eigen::MatrixXd p = test_oracles::random_spd(3, rng);
    const Eigen::VectorXd m = test_oracles::random_vector(3, rng);
    Eigen::MatrixXd a(2, 3);
    a << 1.0, -2.0, 0.5, 0.0, 3.0, 1.0;
    const Eigen::Vector2d b(0.7, -1.1);
    GaussianState state(m, p);
    const auto moments = transform_moments(
        [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x + b; }, state);
    CHECK((moments.mean - (a * m + b)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((moments.cov - a * p * a.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((moments.cross_cov - p * a.transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("square map on the unit Gaussian shows the degree-4 limit") {
    // True E[x^2] = 1 (degree 2, matched exactly); true Var[x^2] = 2 but the
    // two-point rule collapses it to 0.
    GaussianState state(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
    const auto moments = transform_moments(
        [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, x[0] * x[0]); },
        state);
    CHECK(moments.mean[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(moments.cov(0, 0) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("cubature rule matches closed-form Gaussian means for degree <= 3") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim_dist(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = dim_dist(rng);
        const Eigen::VectorXd m = test_oracles::random_vector(n, rng);
        const Eigen::MatrixXd p = test_oracles::random_spd(n, rng);
        const auto poly = test_oracles::random_polynomial(n, rng);
        const double expected = test_oracles::polynomial_gaussian_mean(poly, m, p);

        GaussianState state(m, p);
        const auto moments = transform_moments(
            [&](const Eigen::VectorXd& x) {
                return Eigen::VectorXd::Constant(1, test_oracles::evaluate_polynomial(poly, x));
            },
            state);
        CHECK(std::abs(moments.mean[0] - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("cubature mean of a smooth nonlinearity is close to the closed form") {
    // E[sin(x)] under N(m, s^2) = sin(m) exp(-s^2/2); the rule is approximate
    // beyond degree 3, so only a coarse bound is claimed.
    GaussianState state(Eigen::VectorXd::Constant(1, 0.5),
                        Eigen::MatrixXd::Constant(1, 1, 0.25));
    const auto moments = transform_moments(
        [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, std::sin(x[0])); },
        state);
    const double exact = std::sin(0.5) * std::exp(-0.25 / 2.0);
    CHECK(std::abs(moments.mean[0] - exact) < 0.01);
}

TEST_CASE("inconsistent output dimension raises a shape error") {
    GaussianState state(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
    int calls = 0;
    CHECK_THROWS_AS(transform_moments(
                        [&](const Eigen::VectorXd&) {
                            return Eigen::VectorXd::Zero(++calls == 1 ? 1 : 2);
                        },
                        state),
                    DimensionError);
}

TEST_CASE("non-finite output carries the sigma point index") {
    GaussianState state(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
    try {
        transform_moments(
            [](const Eigen::VectorXd& x) {
                return Eigen::VectorXd::Constant(1, x[0] > 0 ? 1.0 / 0.0 : 0.0);
            },
            state);
        FAIL("expected NumericError");
    } catch (const NumericError& err) {
        CHECK(err.point_index() == 0);
    }
}
