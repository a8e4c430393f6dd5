#pragma once

#include <utility>

#include <Eigen/Dense>

#include "adfslam/core/kalman.hpp"
#include "adfslam/core/models.hpp"
#include "adfslam/core/types.hpp"

namespace adfslam {

/// EKF time update: m- = f(m, 0), P- = Fx P Fx^T + Feps Q Feps^T.
inline GaussianState ekf_predict(const GaussianState& state, const DynamicsModel& dyn, int k) {
    if (state.dim() != dyn.state_dim()) {
        throw DimensionError("ekf_predict: state dimension does not match model");
    }
    const Eigen::VectorXd zero_noise = Eigen::VectorXd::Zero(dyn.noise_dim());
    GaussianState pred;
    pred.mean = dyn.f(state.mean, zero_noise, k);
    const Eigen::MatrixXd fx = dyn.jacobian_x(state.mean, k);
    const Eigen::MatrixXd feps = dyn.jacobian_eps(state.mean, k);
    pred.cov = symmetrized(fx * state.cov * fx.transpose() +
                           feps * dyn.process_noise_cov(k) * feps.transpose());
    if (!pred.is_finite()) {
        throw NumericError("ekf_predict: non-finite prediction");
    }
    return pred;
}

/// EKF measurement update. The innovation mean is h evaluated at the
/// predictive mean; the Jacobian enters only S and C.
inline std::pair<GaussianState, InnovationStats> ekf_update(const GaussianState& state,
                                                            const MeasurementModel& meas,
                                                            const Eigen::VectorXd& y, int k) {
    if (y.size() != meas.meas_dim()) {
        throw DimensionError("ekf_update: measurement dimension mismatch");
    }
    const Eigen::MatrixXd hx = meas.jacobian(state.mean, k);
    InnovationStats stats;
    stats.mean = meas.h(state.mean, k);
    stats.cov = symmetrized(hx * state.cov * hx.transpose() + meas.noise_cov(k));
    stats.cross_cov = state.cov * hx.transpose();
    return {kalman_update_core(state, stats, y), std::move(stats)};
}

}  // namespace adfslam
