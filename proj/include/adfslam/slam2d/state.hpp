#pragma once

#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"
#include "adfslam/core/types.hpp"

namespace adfslam::slam2d {

/// Index layout of the joint SLAM state: pose block (p_x, p_y, theta)
/// followed by p landmark blocks (x_i, y_i).
struct Slam2dLayout {
    int n_landmarks = 0;

    static constexpr int kPoseX = 0;
    static constexpr int kPoseY = 1;
    static constexpr int kTheta = 2;
    static constexpr int kPoseDim = 3;

    Eigen::Index dim() const { return kPoseDim + 2 * n_landmarks; }

    Eigen::Index landmark_offset(int i) const { return kPoseDim + 2 * i; }

    Eigen::Vector2d position(const Eigen::VectorXd& x) const {
        return x.segment<2>(kPoseX);
    }

    double heading(const Eigen::VectorXd& x) const { return x[kTheta]; }

    Eigen::Vector2d landmark(const Eigen::VectorXd& x, int i) const {
        return x.segment<2>(landmark_offset(i));
    }
};

/// Joint prior: pose anchored at its known start with a tight covariance,
/// landmarks at the provided guesses with an isotropic prior_std^2 I block
/// each and zero cross covariance.
inline GaussianState make_slam_prior(const Eigen::Vector3d& start_pose,
                                     const Eigen::Vector3d& pose_prior_var,
                                     const std::vector<Eigen::Vector2d>& landmark_guesses,
                                     double landmark_prior_std) {
    const Slam2dLayout layout{static_cast<int>(landmark_guesses.size())};
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(layout.dim());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(layout.dim(), layout.dim());
    mean.head<3>() = start_pose;
    cov.topLeftCorner<3, 3>() = pose_prior_var.asDiagonal();
    const double var = landmark_prior_std * landmark_prior_std;
    for (int i = 0; i < layout.n_landmarks; ++i) {
        const Eigen::Index off = layout.landmark_offset(i);
        mean.segment<2>(off) = landmark_guesses[i];
        cov.block<2, 2>(off, off) = var * Eigen::Matrix2d::Identity();
    }
    return GaussianState(std::move(mean), std::move(cov));
}

}  // namespace adfslam::slam2d
