#pragma once

#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"
#include "adfslam/core/types.hpp"
#include "adfslam/imu/quaternion.hpp"

namespace adfslam::imu {

/// One synchronized gyro/accelerometer reading integrated over dt seconds.
struct ImuSample {
    Eigen::Vector3d omega{Eigen::Vector3d::Zero()};  // rad/s
    Eigen::Vector3d accel{Eigen::Vector3d::Zero()};  // m/s^2
    double dt{0.0};                                  // s
};

/// Flat 19-dim VIO state: p, v, q (wxyz), diag(T^a), b^a, b^w.
struct VioLayout {
    static constexpr Eigen::Index kPos = 0;
    static constexpr Eigen::Index kVel = 3;
    static constexpr Eigen::Index kQuat = 6;
    static constexpr Eigen::Index kAccelScale = 10;
    static constexpr Eigen::Index kAccelBias = 13;
    static constexpr Eigen::Index kGyroBias = 16;
    static constexpr Eigen::Index kDim = 19;

    static Eigen::Vector3d position(const Eigen::VectorXd& x) { return x.segment<3>(kPos); }
    static Eigen::Vector3d velocity(const Eigen::VectorXd& x) { return x.segment<3>(kVel); }
    static Eigen::Vector4d quaternion(const Eigen::VectorXd& x) { return x.segment<4>(kQuat); }
    static Eigen::Vector3d accel_scale(const Eigen::VectorXd& x) {
        return x.segment<3>(kAccelScale);
    }
    static Eigen::Vector3d accel_bias(const Eigen::VectorXd& x) {
        return x.segment<3>(kAccelBias);
    }
    static Eigen::Vector3d gyro_bias(const Eigen::VectorXd& x) {
        return x.segment<3>(kGyroBias);
    }
};

struct VioPriorOptions {
    double position_var = 1e-4;
    double velocity_var = 1e-6;
    double orientation_var = 1e-3;
    double accel_scale_var = 1e-4;
    double accel_bias_var = 1e-4;
    double gyro_bias_var = 1e-4;
};

/// Initial VIO Gaussian: accelerometer scale set to ones, biases to zero,
/// block-diagonal covariance from the per-block variances.
inline GaussianState make_vio_prior(const Eigen::Vector3d& position,
                                    const Eigen::Vector3d& velocity,
                                    const Eigen::Vector4d& orientation,
                                    const VioPriorOptions& options = {}) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(VioLayout::kDim);
    mean.segment<3>(VioLayout::kPos) = position;
    mean.segment<3>(VioLayout::kVel) = velocity;
    mean.segment<4>(VioLayout::kQuat) = quat_normalize(orientation);
    mean.segment<3>(VioLayout::kAccelScale) = Eigen::Vector3d::Ones();

    Eigen::VectorXd var(VioLayout::kDim);
    var.segment<3>(VioLayout::kPos).setConstant(options.position_var);
    var.segment<3>(VioLayout::kVel).setConstant(options.velocity_var);
    var.segment<4>(VioLayout::kQuat).setConstant(options.orientation_var);
    var.segment<3>(VioLayout::kAccelScale).setConstant(options.accel_scale_var);
    var.segment<3>(VioLayout::kAccelBias).setConstant(options.accel_bias_var);
    var.segment<3>(VioLayout::kGyroBias).setConstant(options.gyro_bias_var);
    return GaussianState(mean, var.asDiagonal());
}

}  // namespace adfslam::imu
