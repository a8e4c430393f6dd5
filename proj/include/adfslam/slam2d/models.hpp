#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adfslam/core/models.hpp"
#include "adfslam/slam2d/camera.hpp"
#include "adfslam/slam2d/state.hpp"

namespace adfslam::slam2d {

/// Odometry increments for one step, world frame.
struct OdometryControl {
    Eigen::Vector2d delta_pos = Eigen::Vector2d::Zero();
    double delta_theta = 0.0;
};

/// Row of the measurement Jacobian for landmark i: chain rule through the
/// extended projection. Nonzero only in the pose block and landmark-i block.
inline Eigen::RowVectorXd measurement_jacobian(const Eigen::VectorXd& state_mean, int i,
                                               const CameraIntrinsics2d& intr,
                                               const Slam2dLayout& layout) {
    const Eigen::Vector2d cam_pos = layout.position(state_mean);
    const double theta = layout.heading(state_mean);
    const Eigen::Vector2d lm = layout.landmark(state_mean, i);

    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Eigen::Vector2d d = lm - cam_pos;
    const double a = c * d[0] + s * d[1];   // lateral
    const double b = -s * d[0] + c * d[1];  // depth
    const double r2 = a * a + b * b;

    // (g_a, g_b) = gradient of the extended projection w.r.t. (lateral, depth).
    double g_a = 0.0;
    double g_b = 0.0;
    if (r2 >= intr.depth_epsilon * intr.depth_epsilon) {
        const double y_sat = intr.saturation_halfwidth;
        const double phi = std::atan2(a, b);
        if (std::abs(phi) <= std::atan2(y_sat, intr.focal)) {
            g_a = intr.focal / b;
            g_b = -intr.focal * a / (b * b);
        } else {
            const double slope = intr.focal + y_sat * y_sat / intr.focal;
            g_a = slope * b / r2;
            g_b = -slope * a / r2;
        }
    }

    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(layout.dim());
    const double d_lx = g_a * c - g_b * s;
    const double d_ly = g_a * s + g_b * c;
    row[Slam2dLayout::kPoseX] = -d_lx;
    row[Slam2dLayout::kPoseY] = -d_ly;
    row[Slam2dLayout::kTheta] = g_a * b - g_b * a;
    row[layout.landmark_offset(i)] = d_lx;
    row[layout.landmark_offset(i) + 1] = d_ly;
    return row;
}

/// Stacked 1D projections of a fixed set of visible landmarks, with
/// independent noise R = sigma_r^2 I. h uses the saturating extension so the
/// model is total on sigma points; the analytic Jacobian matches it.
class StackedProjectionModel : public MeasurementModel {
public:
    StackedProjectionModel(Slam2dLayout layout, std::vector<int> landmark_ids,
                           CameraIntrinsics2d intr, double sigma_r)
        : layout_(layout),
          ids_(std::move(landmark_ids)),
          intr_(intr),
          sigma_r_(sigma_r) {}

    Eigen::Index meas_dim() const override { return static_cast<Eigen::Index>(ids_.size()); }

    Eigen::VectorXd h(const Eigen::VectorXd& x, int) const override {
        const Eigen::Vector2d cam_pos = layout_.position(x);
        const double theta = layout_.heading(x);
        Eigen::VectorXd out(meas_dim());
        for (std::size_t j = 0; j < ids_.size(); ++j) {
            const Eigen::Vector2d cam_point =
                camera_frame_point(cam_pos, theta, layout_.landmark(x, ids_[j]));
            out[static_cast<Eigen::Index>(j)] = detail::project_extended(cam_point, intr_);
        }
        return out;
    }

    Eigen::MatrixXd noise_cov(int) const override {
        return sigma_r_ * sigma_r_ *
               Eigen::MatrixXd::Identity(meas_dim(), meas_dim());
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, int) const override {
        Eigen::MatrixXd jac(meas_dim(), layout_.dim());
        for (std::size_t j = 0; j < ids_.size(); ++j) {
            jac.row(static_cast<Eigen::Index>(j)) =
                measurement_jacobian(x, ids_[j], intr_, layout_);
        }
        return jac;
    }

    const std::vector<int>& landmark_ids() const { return ids_; }

private:
    Slam2dLayout layout_;
    std::vector<int> ids_;
    CameraIntrinsics2d intr_;
    double sigma_r_;
};

/// Builds the per-frame measurement model over the currently visible set.
/// An empty set means there is nothing to update with; callers skip the step.
inline StackedProjectionModel stacked_measurement_model(const Slam2dLayout& layout,
                                                        std::vector<int> visible_ids,
                                                        const CameraIntrinsics2d& intr,
                                                        double sigma_r) {
    return StackedProjectionModel(layout, std::move(visible_ids), intr, sigma_r);
}

/// Linear-additive odometry dynamics: the pose block moves by the control
/// increment plus Gaussian noise, landmarks obey unit dynamics with no
/// process noise. Linear, so the EKF prediction step is the exact linear
/// Kalman prediction under either filter mode.
class OdometryDynamicsModel : public DynamicsModel {
public:
    OdometryDynamicsModel(Slam2dLayout layout, OdometryControl control, Eigen::Matrix3d q_pose)
        : layout_(layout), control_(control), q_pose_(std::move(q_pose)) {}

    Eigen::Index state_dim() const override { return layout_.dim(); }
    Eigen::Index noise_dim() const override { return 3; }

    Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& eps, int) const override {
        Eigen::VectorXd next = x;
        next.segment<2>(Slam2dLayout::kPoseX) += control_.delta_pos + eps.head<2>();
        next[Slam2dLayout::kTheta] += control_.delta_theta + eps[2];
        return next;
    }

    Eigen::MatrixXd process_noise_cov(int) const override { return q_pose_; }

    Eigen::MatrixXd jacobian_x(const Eigen::VectorXd&, int) const override {
        return Eigen::MatrixXd::Identity(layout_.dim(), layout_.dim());
    }

    Eigen::MatrixXd jacobian_eps(const Eigen::VectorXd&, int) const override {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(layout_.dim(), 3);
        g.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity();
        return g;
    }

private:
    Slam2dLayout layout_;
    OdometryControl control_;
    Eigen::Matrix3d q_pose_;
};

inline OdometryDynamicsModel slam_dynamics_model(const Slam2dLayout& layout,
                                                 const OdometryControl& control,
                                                 const Eigen::Matrix3d& q_pose) {
    return OdometryDynamicsModel(layout, control, q_pose);
}

}  // namespace adfslam::slam2d
