#pragma once

#include <utility>

#include <Eigen/Dense>

#include "adfslam/core/cubature.hpp"
#include "adfslam/core/kalman.hpp"
#include "adfslam/core/models.hpp"
#include "adfslam/core/types.hpp"

namespace adfslam {

/// Moment-matched time update for non-additive noise. The state is augmented
/// with the noise process, x_hat = (x, eps), mean (m, 0) and covariance
/// blkdiag(P, Q), so one cubature pass with 2(d+s) points covers the double
/// integral. s = 0 degrades to a plain moment transform of f.
inline GaussianState ukf_predict(const GaussianState& state, const DynamicsModel& dyn, int k) {
    const Eigen::Index d = dyn.state_dim();
    const Eigen::Index s = dyn.noise_dim();
    if (state.dim() != d) {
        throw DimensionError("ukf_predict: state dimension does not match model");
    }

    GaussianState augmented;
    if (s > 0) {
        augmented.mean = Eigen::VectorXd::Zero(d + s);
        augmented.mean.head(d) = state.mean;
        augmented.cov = Eigen::MatrixXd::Zero(d + s, d + s);
        augmented.cov.topLeftCorner(d, d) = state.cov;
        augmented.cov.bottomRightCorner(s, s) = dyn.process_noise_cov(k);
    } else {
        augmented = state;
    }

    const TransformedMoments moments = transform_moments(
        [&](const Eigen::VectorXd& z) {
            return dyn.f(z.head(d), z.tail(s), k);
        },
        augmented);

    GaussianState pred(moments.mean, moments.cov);
    if (!pred.is_finite()) {
        throw NumericError("ukf_predict: non-finite prediction");
    }
    return pred;
}

/// Moment-matched measurement update: mu, S (noise added) and C come from a
/// cubature pass over the predictive density, then the shared Kalman core.
inline std::pair<GaussianState, InnovationStats> ukf_update(const GaussianState& state,
                                                            const MeasurementModel& meas,
                                                            const Eigen::VectorXd& y, int k) {
    if (y.size() != meas.meas_dim()) {
        throw DimensionError("ukf_update: measurement dimension mismatch");
    }
    const TransformedMoments moments = transform_moments(
        [&](const Eigen::VectorXd& x) { return meas.h(x, k); }, state);

    InnovationStats stats;
    stats.mean = moments.mean;
    stats.cov = symmetrized(moments.cov + meas.noise_cov(k));
    stats.cross_cov = moments.cross_cov;
    return {kalman_update_core(state, stats, y), std::move(stats)};
}

}  // namespace adfslam
