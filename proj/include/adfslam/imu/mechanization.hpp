#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"
#include "adfslam/core/models.hpp"
#include "adfslam/imu/quaternion.hpp"
#include "adfslam/imu/state.hpp"

namespace adfslam::imu {

/// Bias-corrected readings (a~, w~): a~_i = T_i a_i - b^a_i, w~ = w - b^w.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> bias_correct(
    const ImuSample& sample, const Eigen::Vector3d& accel_scale,
    const Eigen::Vector3d& accel_bias, const Eigen::Vector3d& gyro_bias) {
    return {accel_scale.cwiseProduct(sample.accel) - accel_bias,
            sample.omega - gyro_bias};
}

/// One strapdown step:
///   q_k = Omega[(w~ + eps_w) dt] q_{k-1}
///   v_k = v_{k-1} + (q_k (a~ + eps_a) q_k* - g) dt
///   p_k = p_{k-1} + v_{k-1} dt
/// Biases and the accelerometer scale are carried unchanged (no mean
/// reversion). The already-propagated q_k feeds the velocity update.
inline Eigen::VectorXd mechanize(const Eigen::VectorXd& x, const ImuSample& sample,
                                 const Eigen::Vector3d& eps_a,
                                 const Eigen::Vector3d& eps_w,
                                 const Eigen::Vector3d& gravity,
                                 bool renormalize = true) {
    if (x.size() != VioLayout::kDim) {
        throw DimensionError("mechanize: state must have dimension " +
                             std::to_string(VioLayout::kDim) + ", got " +
                             std::to_string(x.size()));
    }
    if (!std::isfinite(sample.dt) || sample.dt <= 0.0) {
        throw NumericError("mechanize: sample dt must be positive and finite");
    }

    const auto [a_tilde, w_tilde] =
        bias_correct(sample, VioLayout::accel_scale(x), VioLayout::accel_bias(x),
                     VioLayout::gyro_bias(x));

    Eigen::Vector4d q = omega_matrix((w_tilde + eps_w) * sample.dt) *
                        VioLayout::quaternion(x);
    if (renormalize) {
        q = quat_normalize(q);
    }
    const Eigen::Vector3d v_prev = VioLayout::velocity(x);
    const Eigen::Vector3d v =
        v_prev + (rotate_vector(q, a_tilde + eps_a) - gravity) * sample.dt;

    Eigen::VectorXd out = x;
    out.segment<3>(VioLayout::kPos) = VioLayout::position(x) + v_prev * sample.dt;
    out.segment<3>(VioLayout::kVel) = v;
    out.segment<4>(VioLayout::kQuat) = q;
    return out;
}

/// Mechanization wrapped as a dynamics model with eps = (eps_a, eps_w) and
/// Q_k = Q dt. Sigma points are propagated without per-point renormalization
/// (the harness renormalizes the posterior mean instead), keeping the moment
/// match on the literal R^4 map.
class VioDynamicsModel final : public DynamicsModel {
public:
    VioDynamicsModel(ImuSample sample, Eigen::Matrix<double, 6, 6> noise_psd,
                     Eigen::Vector3d gravity, bool renormalize)
        : sample_(std::move(sample)),
          noise_psd_(std::move(noise_psd)),
          gravity_(std::move(gravity)),
          renormalize_(renormalize) {}

    Eigen::Index state_dim() const override { return VioLayout::kDim; }
    Eigen::Index noise_dim() const override { return 6; }

    Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                      int) const override {
        return mechanize(x, sample_, eps.head<3>(), eps.tail<3>(), gravity_,
                         renormalize_);
    }

    Eigen::MatrixXd process_noise_cov(int) const override {
        return noise_psd_ * sample_.dt;
    }

    const ImuSample& sample() const { return sample_; }

private:
    ImuSample sample_;
    Eigen::Matrix<double, 6, 6> noise_psd_;
    Eigen::Vector3d gravity_;
    bool renormalize_;
};

inline VioDynamicsModel vio_dynamics_model(
    const ImuSample& sample, const Eigen::Matrix<double, 6, 6>& noise_psd,
    const Eigen::Vector3d& gravity = {0.0, 0.0, 9.81}, bool renormalize = false) {
    return VioDynamicsModel(sample, noise_psd, gravity, renormalize);
}

}  // namespace adfslam::imu
