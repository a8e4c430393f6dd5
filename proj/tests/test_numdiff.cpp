#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <Eigen/Dense>

#include "adfslam/core/numdiff.hpp"

using adfslam::finite_difference_jacobian;
using adfslam::NumericError;

TEST_CASE("finite differences recover a linear map") {
    Eigen::MatrixXd a(2, 3);
    a << 1.0, 2.0, -0.5, 0.0, -1.0, 4.0;
    const auto jac = finite_difference_jacobian(
        [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; },
        Eigen::Vector3d(0.3, -0.7, 2.0));
    CHECK((jac - a).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("derivative of sin at zero") {
    const auto jac = finite_difference_jacobian(
        [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, std::sin(x[0])); },
        Eigen::VectorXd::Zero(1), 1e-5);
    CHECK(std::abs(jac(0, 0) - 1.0) < 1e-8);
}

TEST_CASE("constant function has zero Jacobian") {
    const auto jac = finite_difference_jacobian(
        [](const Eigen::VectorXd&) { return Eigen::Vector2d(3.0, -1.0); },
        Eigen::Vector2d(5.0, 6.0));
    CHECK(jac.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("non-finite evaluation raises a numeric error") {
    CHECK_THROWS_AS(finite_difference_jacobian(
                        [](const Eigen::VectorXd& x) {
                            return Eigen::VectorXd::Constant(1, std::log(x[0]));
                        },
                        Eigen::VectorXd::Zero(1)),
                    NumericError);
}
