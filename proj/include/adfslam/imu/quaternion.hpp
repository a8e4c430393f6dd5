#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"

namespace adfslam::imu {

// Quaternions are plain Vector4d in (w, x, y, z) order.

/// Skew structure of u embedded in 4x4: Omega[phi] = cos(|phi|/2) I + k Phi(phi).
/// Left-multiplying a quaternion by Phi(u) equals the Hamilton product
/// (0, u) * q.
inline Eigen::Matrix4d phi_matrix(const Eigen::Vector3d& u) {
    Eigen::Matrix4d m;
    m << 0.0, -u[0], -u[1], -u[2],
        u[0], 0.0, -u[2], u[1],
        u[1], u[2], 0.0, -u[0],
        u[2], -u[1], u[0], 0.0;
    return m;
}

/// Exact quaternion-increment matrix: Omega[phi] q = exp(phi / 2) * q, the
/// axis-angle rotation by |phi| about phi. Orthogonal for every phi.
inline Eigen::Matrix4d omega_matrix(const Eigen::Vector3d& phi) {
    const double angle = phi.norm();
    // sin(angle/2)/angle, series below the switch point
    const double k = angle < 1e-8 ? 0.5 - angle * angle / 48.0
                                  : std::sin(0.5 * angle) / angle;
    return std::cos(0.5 * angle) * Eigen::Matrix4d::Identity() + k * phi_matrix(phi);
}

inline Eigen::Vector4d quat_multiply(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
    Eigen::Vector4d q;
    q[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
    q[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2];
    q[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1];
    q[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0];
    return q;
}

inline Eigen::Vector4d quat_conjugate(const Eigen::Vector4d& q) {
    return {q[0], -q[1], -q[2], -q[3]};
}

inline Eigen::Vector4d quat_normalize(const Eigen::Vector4d& q) {
    const double n = q.norm();
    if (!std::isfinite(n) || n <= 0.0) {
        throw NumericError("quat_normalize: vanishing or non-finite norm");
    }
    return q / n;
}

inline Eigen::Vector4d from_axis_angle(const Eigen::Vector3d& axis, double angle) {
    const Eigen::Vector3d u = axis.normalized();
    Eigen::Vector4d q;
    q << std::cos(0.5 * angle), std::sin(0.5 * angle) * u;
    return q;
}

/// Vector part of the sandwich q (0, v) q*. Equals R(q) v for unit q; for
/// general q (e.g. sigma-point perturbations) this is the literal R^4 algebra.
inline Eigen::Vector3d rotate_vector(const Eigen::Vector4d& q, const Eigen::Vector3d& v) {
    const double w = q[0];
    const Eigen::Vector3d u = q.tail<3>();
    return (w * w - u.squaredNorm()) * v + 2.0 * u.dot(v) * u + 2.0 * w * u.cross(v);
}

}  // namespace adfslam::imu
