#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"

namespace adfslam::slam2d {

/// Thrown when a landmark sits behind the camera or at degenerate depth.
class DegenerateDepthError : public FilterError {
public:
    explicit DegenerateDepthError(const std::string& msg) : FilterError(msg) {}
};

/// Intrinsics of the 1D-image pinhole camera: focal length f, principal
/// point c (both in normalized image units) plus the visibility half-width.
struct CameraIntrinsics2d {
    double focal = 1.5;
    double principal = 0.0;
    double image_halfwidth = 1.0;
    double depth_epsilon = 1e-3;
    // Image coordinate (relative to the principal point) past which the
    // filter-side projection saturates. Must exceed image_halfwidth so every
    // real measurement lies in the exact-pinhole region.
    double saturation_halfwidth = 2.0;
};

/// Planar camera-to-world rotation.
inline Eigen::Matrix2d rotation_matrix(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
}

/// Camera-frame coordinates of a world landmark: (lateral, depth).
inline Eigen::Vector2d camera_frame_point(const Eigen::Vector2d& cam_pos, double heading,
                                          const Eigen::Vector2d& landmark) {
    return rotation_matrix(heading).transpose() * (landmark - cam_pos);
}

namespace detail {
/// Exact pinhole image coordinate of a camera-frame point, no guards.
inline double project_exact(const Eigen::Vector2d& cam_point, const CameraIntrinsics2d& intr) {
    return (intr.focal * cam_point[0] + intr.principal * cam_point[1]) / cam_point[1];
}

/// Filter-side projection, total in the state. Matches the exact pinhole
/// while the principal-point-relative coordinate stays within the saturation
/// halfwidth; outside, it continues linearly in the bearing angle with the
/// slope matched at the junction. Sigma points that land near or behind the
/// image plane then map to bounded values that stay monotone in bearing,
/// which keeps the matched moments finite and correctly signed.
inline double project_extended(const Eigen::Vector2d& cam_point, const CameraIntrinsics2d& intr) {
    const double a = cam_point[0];
    const double b = cam_point[1];
    if (a * a + b * b < intr.depth_epsilon * intr.depth_epsilon) {
        return intr.principal;
    }
    const double y_sat = intr.saturation_halfwidth;
    const double phi = std::atan2(a, b);
    const double phi_sat = std::atan2(y_sat, intr.focal);
    if (std::abs(phi) <= phi_sat) {
        return intr.principal + intr.focal * a / b;
    }
    const double slope = intr.focal + y_sat * y_sat / intr.focal;
    const double sign = phi < 0.0 ? -1.0 : 1.0;
    return intr.principal + sign * (y_sat + slope * (std::abs(phi) - phi_sat));
}
}  // namespace detail

/// 1D image coordinate of a landmark: u1/u2 of [[f, c], [0, 1]] applied to
/// the camera-frame point. Degenerate depth is an error here; the filter-side
/// measurement model uses the saturating extension instead.
inline double project_landmark(const Eigen::Vector2d& cam_pos, double heading,
                               const Eigen::Vector2d& landmark,
                               const CameraIntrinsics2d& intr) {
    const Eigen::Vector2d cam_point = camera_frame_point(cam_pos, heading, landmark);
    if (std::abs(cam_point[1]) < intr.depth_epsilon) {
        throw DegenerateDepthError("project_landmark: landmark at degenerate depth");
    }
    return detail::project_exact(cam_point, intr);
}

/// Indices (ascending) of landmarks inside the camera frustum: positive
/// depth and projection within the image half-width.
inline std::vector<int> visible_landmarks(const Eigen::Vector2d& cam_pos, double heading,
                                          const std::vector<Eigen::Vector2d>& landmarks,
                                          const CameraIntrinsics2d& intr) {
    std::vector<int> visible;
    for (int i = 0; i < static_cast<int>(landmarks.size()); ++i) {
        const Eigen::Vector2d cam_point = camera_frame_point(cam_pos, heading, landmarks[i]);
        if (cam_point[1] < intr.depth_epsilon) {
            continue;
        }
        if (std::abs(detail::project_exact(cam_point, intr)) <= intr.image_halfwidth) {
            visible.push_back(i);
        }
    }
    return visible;
}

}  // namespace adfslam::slam2d
