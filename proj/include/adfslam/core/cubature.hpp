#pragma once

#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Dense>

#include "adfslam/core/cholesky.hpp"
#include "adfslam/core/errors.hpp"
#include "adfslam/core/types.hpp"

namespace adfslam {

/// Unit-Gaussian evaluation points of the symmetric 3rd-order cubature rule.
/// Columns of `unit_points` are the 2n vectors xi_i; all weights equal 1/(2n).
struct CubaturePointSet {
    Eigen::MatrixXd unit_points;  // n x 2n
    Eigen::VectorXd weights;      // 2n

    Eigen::Index dim() const { return unit_points.rows(); }
    Eigen::Index count() const { return unit_points.cols(); }
};

/// 3rd-order spherical cubature rule for an n-dimensional unit Gaussian:
/// points +sqrt(n) e_i (i = 1..n) then -sqrt(n) e_i, weights 1/(2n).
inline CubaturePointSet generate_cubature_points(Eigen::Index n) {
    if (n < 1) {
        throw DimensionError("generate_cubature_points: dimension must be >= 1");
    }
    const double radius = std::sqrt(static_cast<double>(n));
    CubaturePointSet rule;
    rule.unit_points = Eigen::MatrixXd::Zero(n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.unit_points(i, i) = radius;
        rule.unit_points(i, n + i) = -radius;
    }
    rule.weights = Eigen::VectorXd::Constant(2 * n, 1.0 / static_cast<double>(2 * n));
    return rule;
}

/// Sigma points z_i = mean + L xi_i with L the lower Cholesky factor of cov
/// (jitter policy applies). Columns are the points.
inline Eigen::MatrixXd sigma_points(const GaussianState& state, const CubaturePointSet& rule) {
    if (rule.dim() != state.dim()) {
        throw DimensionError("sigma_points: rule dimension does not match state dimension");
    }
    const Eigen::MatrixXd l = cholesky_sqrt(state.cov).factor;
    return (l * rule.unit_points).colwise() + state.mean;
}

/// Moments of g(x) under x ~ N(mean, cov), approximated by the cubature rule.
struct TransformedMoments {
    Eigen::VectorXd mean;       // E[g(x)]
    Eigen::MatrixXd cov;        // Cov[g(x)], no measurement noise added
    Eigen::MatrixXd cross_cov;  // Cov[x, g(x)]
};

using VectorFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Propagates a Gaussian through an arbitrary vector function by
/// moment matching on the cubature points.
inline TransformedMoments transform_moments(const VectorFunction& g, const GaussianState& state) {
    const Eigen::Index n = state.dim();
    const CubaturePointSet rule = generate_cubature_points(n);
    const Eigen::MatrixXd points = sigma_points(state, rule);
    const Eigen::Index count = rule.count();

    Eigen::MatrixXd values;  // m x 2n, column i = g(z_i)
    Eigen::Index m = -1;
    for (Eigen::Index i = 0; i < count; ++i) {
        const Eigen::VectorXd gi = g(points.col(i));
        if (m < 0) {
            m = gi.size();
            values.resize(m, count);
        } else if (gi.size() != m) {
            std::ostringstream msg;
            msg << "transform_moments: g returned inconsistent dimension " << gi.size()
                << " (expected " << m << ") at sigma point " << i;
            throw DimensionError(msg.str());
        }
        if (!gi.allFinite()) {
            std::ostringstream msg;
            msg << "transform_moments: non-finite g output at sigma point " << i;
            throw NumericError(msg.str(), i);
        }
        values.col(i) = gi;
    }

    TransformedMoments out;
    out.mean = values * rule.weights;

    const Eigen::MatrixXd centered = values.colwise() - out.mean;
    const Eigen::MatrixXd centered_in = points.colwise() - state.mean;
    out.cov = symmetrized(centered * rule.weights.asDiagonal() * centered.transpose());
    out.cross_cov = centered_in * rule.weights.asDiagonal() * centered.transpose();
    return out;
}

}  // namespace adfslam
