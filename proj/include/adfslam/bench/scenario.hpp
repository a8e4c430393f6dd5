#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adfslam/bench/rng.hpp"
#include "adfslam/core/errors.hpp"
#include "adfslam/slam2d/camera.hpp"
#include "adfslam/slam2d/models.hpp"

namespace adfslam::bench {

class InvalidScenarioError : public FilterError {
public:
    using FilterError::FilterError;
};

class DegenerateScenarioError : public FilterError {
public:
    using FilterError::FilterError;
};

struct ScenarioConfig {
    int n_steps = 197;
    int n_landmarks = 20;
    int n_loops = 2;
    double path_radius = 3.0;
    double landmark_ring_radius = 5.0;
    double odom_pos_std = 0.02;
    double odom_theta_std = 0.01;
    double meas_std = 0.05;
    double landmark_prior_std = 4.0;
    Eigen::Vector3d pose_prior_var{1e-4, 1e-4, 1e-6};
    slam2d::CameraIntrinsics2d intrinsics{};
    std::uint64_t seed = 1;
};

inline void validate_scenario_config(const ScenarioConfig& c) {
    if (c.n_steps < 1 || c.n_landmarks < 1 || c.n_loops < 1) {
        throw InvalidScenarioError("scenario counts must be positive");
    }
    if (c.path_radius <= 0.0 || c.landmark_ring_radius <= 0.0) {
        throw InvalidScenarioError("scenario radii must be positive");
    }
    if (c.odom_pos_std < 0.0 || c.odom_theta_std < 0.0 || c.meas_std < 0.0 ||
        c.landmark_prior_std < 0.0) {
        throw InvalidScenarioError("noise scales must be nonnegative");
    }
    if (c.pose_prior_var.minCoeff() < 0.0) {
        throw InvalidScenarioError("pose prior variances must be nonnegative");
    }
    if (c.intrinsics.focal <= 0.0 || c.intrinsics.image_halfwidth <= 0.0 ||
        c.intrinsics.depth_epsilon <= 0.0) {
        throw InvalidScenarioError("camera intrinsics must be positive");
    }
}

/// Observations attached to one time step: visible ids ascending, stacked
/// projections in the same order.
struct StepMeasurements {
    std::vector<int> ids;
    Eigen::VectorXd noiseless;
    Eigen::VectorXd noisy;
};

struct Scenario {
    ScenarioConfig config;
    std::vector<Eigen::Vector3d> gt_path;            // poses 0..n_steps, (x, y, theta)
    std::vector<Eigen::Vector2d> gt_landmarks;       // n_landmarks points
    std::vector<slam2d::OdometryControl> controls;   // control k moves pose k to k+1
    std::vector<StepMeasurements> measurements;      // entry k observed at pose k+1
    double scene_diameter = 0.0;                     // max pairwise landmark distance
};

/// Circular route with tangential heading, landmarks on a jittered outer
/// ring, noisy world-frame odometry increments, and noisy projections of the
/// per-pose visible sets.
inline Scenario generate_scenario(const ScenarioConfig& config) {
    validate_scenario_config(config);
    Scenario sc;
    sc.config = config;

    std::mt19937_64 rng = derive_rng(config.seed, RngStream::kScenario);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;

    const double slot = two_pi / config.n_landmarks;
    for (int i = 0; i < config.n_landmarks; ++i) {
        const double angle = slot * (i + 0.25 * uniform(rng));
        const double radius = config.landmark_ring_radius * (1.0 + 0.05 * uniform(rng));
        sc.gt_landmarks.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
    }
    sc.scene_diameter = 0.0;
    for (std::size_t i = 0; i < sc.gt_landmarks.size(); ++i) {
        for (std::size_t j = i + 1; j < sc.gt_landmarks.size(); ++j) {
            sc.scene_diameter = std::max(
                sc.scene_diameter, (sc.gt_landmarks[i] - sc.gt_landmarks[j]).norm());
        }
    }

    const auto pose_at = [&](int k) {
        const double phi = two_pi * config.n_loops * k / config.n_steps;
        return Eigen::Vector3d(config.path_radius * std::cos(phi),
                               config.path_radius * std::sin(phi), phi);
    };
    for (int k = 0; k <= config.n_steps; ++k) {
        sc.gt_path.push_back(pose_at(k));
    }

    bool any_visible = false;
    for (int k = 0; k < config.n_steps; ++k) {
        const Eigen::Vector3d delta = sc.gt_path[k + 1] - sc.gt_path[k];
        slam2d::OdometryControl control;
        control.delta_pos = delta.head<2>() +
                            config.odom_pos_std * Eigen::Vector2d(gauss(rng), gauss(rng));
        control.delta_theta = delta[2] + config.odom_theta_std * gauss(rng);
        sc.controls.push_back(control);

        const Eigen::Vector3d& pose = sc.gt_path[k + 1];
        StepMeasurements step;
        step.ids = slam2d::visible_landmarks(pose.head<2>(), pose[2], sc.gt_landmarks,
                                             config.intrinsics);
        step.noiseless.resize(static_cast<Eigen::Index>(step.ids.size()));
        step.noisy.resize(step.noiseless.size());
        for (std::size_t j = 0; j < step.ids.size(); ++j) {
            const double y = slam2d::project_landmark(
                pose.head<2>(), pose[2], sc.gt_landmarks[step.ids[j]], config.intrinsics);
            step.noiseless[static_cast<Eigen::Index>(j)] = y;
            step.noisy[static_cast<Eigen::Index>(j)] = y + config.meas_std * gauss(rng);
        }
        any_visible = any_visible || !step.ids.empty();
        sc.measurements.push_back(std::move(step));
    }
    if (!any_visible) {
        throw DegenerateScenarioError("no landmark visible at any pose");
    }
    return sc;
}

}  // namespace adfslam::bench
