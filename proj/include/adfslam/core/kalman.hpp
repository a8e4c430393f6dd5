#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"
#include "adfslam/core/types.hpp"

namespace adfslam {

/// Shared Kalman update: K = C S^-1, m = m- + K (y - mu), P = P- - K S K^T.
/// The gain solve goes through the Cholesky factor of S; a failed
/// factorization means a singular innovation.
inline GaussianState kalman_update_core(const GaussianState& pred, const InnovationStats& stats,
                                        const Eigen::VectorXd& y) {
    const Eigen::Index d = pred.dim();
    const Eigen::Index m = stats.mean.size();
    if (y.size() != m || stats.cov.rows() != m || stats.cov.cols() != m ||
        stats.cross_cov.rows() != d || stats.cross_cov.cols() != m) {
        throw DimensionError("kalman_update_core: inconsistent innovation dimensions");
    }
    if (!stats.cov.allFinite() || !stats.mean.allFinite() || !stats.cross_cov.allFinite()) {
        throw NumericError("kalman_update_core: non-finite innovation statistics");
    }

    Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(stats.cov));
    if (llt.info() != Eigen::Success) {
        throw SingularInnovationError("kalman_update_core: innovation covariance not invertible");
    }
    // K^T = S^-1 C^T
    const Eigen::MatrixXd gain = llt.solve(stats.cross_cov.transpose()).transpose();

    GaussianState post;
    post.mean = pred.mean + gain * (y - stats.mean);
    post.cov = symmetrized(pred.cov - gain * stats.cov * gain.transpose());
    if (!post.is_finite()) {
        throw NumericError("kalman_update_core: non-finite posterior");
    }
    return post;
}

}  // namespace adfslam
