#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adfslam/bench/metrics.hpp"
#include "adfslam/core/ekf.hpp"
#include "adfslam/core/models.hpp"
#include "adfslam/core/numdiff.hpp"
#include "adfslam/core/ukf.hpp"
#include "adfslam/imu/mechanization.hpp"
#include "adfslam/imu/quaternion.hpp"
#include "adfslam/imu/state.hpp"
#include "adfslam/slam2d/models.hpp"

namespace adfslam {

/// One spot-checked numerical contract: worst observed deviation vs bound.
struct SelftestProperty {
    std::string name;
    double tolerance = 0.0;
    double observed = 0.0;
    bool passed = false;
};

struct SelftestReport {
    std::vector<SelftestProperty> properties;

    bool all_passed() const {
        return std::all_of(properties.begin(), properties.end(),
                           [](const SelftestProperty& p) { return p.passed; });
    }
};

namespace selftest_detail {

inline SelftestProperty make_property(std::string name, double tolerance, double observed) {
    SelftestProperty p;
    p.name = std::move(name);
    p.tolerance = tolerance;
    p.observed = observed;
    p.passed = observed <= tolerance;
    return p;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double floor) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(i, j) = gauss(rng);
        }
    }
    return a * a.transpose() / static_cast<double>(n) +
           floor * Eigen::MatrixXd::Identity(n, n);
}

/// Cubature mean of a random polynomial of total degree <= 3 against the
/// closed-form Gaussian expectation. The polynomial is built in whitened
/// coordinates xi = L^-1 (x - m), where its expectation is alpha + tr(Gamma).
inline SelftestProperty cubature_exactness() {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (Eigen::Index n = 1; n <= 5; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXd mean(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                mean[i] = gauss(rng);
            }
            const Eigen::MatrixXd cov = random_spd(rng, n, 0.3);
            const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

            const double alpha = gauss(rng);
            Eigen::VectorXd beta(n), delta(n);
            Eigen::MatrixXd gamma(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                beta[i] = gauss(rng);
                delta[i] = gauss(rng);
                for (Eigen::Index j = 0; j < n; ++j) {
                    gamma(i, j) = gauss(rng);
                }
            }
            const double mixed = gauss(rng);

            const auto poly = [&](const Eigen::VectorXd& xi) {
                double v = alpha + beta.dot(xi) + xi.dot(gamma * xi);
                for (Eigen::Index i = 0; i < n; ++i) {
                    v += delta[i] * xi[i] * xi[i] * xi[i];
                }
                if (n >= 2) {
                    v += mixed * xi[0] * xi[0] * xi[1];
                }
                return v;
            };
            const double truth = alpha + gamma.trace();

            const GaussianState state(mean, cov);
            const auto moments = transform_moments(
                [&](const Eigen::VectorXd& x) {
                    const Eigen::VectorXd xi =
                        l.triangularView<Eigen::Lower>().solve(x - mean);
                    return Eigen::VectorXd::Constant(1, poly(xi)).eval();
                },
                state);
            worst = std::max(worst, std::abs(moments.mean[0] - truth) /
                                        std::max(1.0, std::abs(truth)));
        }
    }
    return make_property("cubature-degree3-exactness", 1e-9, worst);
}

/// On a linear-Gaussian model the EKF and UKF passes must coincide with the
/// closed-form Kalman recursion.
inline SelftestProperty linear_kf_equivalence() {
    std::mt19937_64 rng(202);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Eigen::Index d = 4;
    const Eigen::Index m = 2;

    Eigen::MatrixXd f(d, d), h(m, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            f(i, j) = gauss(rng);
        }
    }
    f *= 0.9 / f.norm();
    f += Eigen::MatrixXd::Identity(d, d) * 0.5;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            h(i, j) = gauss(rng);
        }
    }
    const Eigen::MatrixXd q = random_spd(rng, d, 1e-3) * 0.01;
    const Eigen::MatrixXd r = random_spd(rng, m, 1e-3) * 0.01;

    FunctionalDynamicsModel dyn(
        d, d,
        [f](const Eigen::VectorXd& x, const Eigen::VectorXd& eps, int) {
            return (f * x + eps).eval();
        },
        q);
    dyn.set_jacobians(f, Eigen::MatrixXd::Identity(d, d));
    FunctionalMeasurementModel meas(
        m, [h](const Eigen::VectorXd& x, int) { return (h * x).eval(); }, r);
    meas.set_jacobian(h);

    Eigen::VectorXd mean0(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        mean0[i] = gauss(rng);
    }
    GaussianState ekf_state(mean0, Eigen::MatrixXd::Identity(d, d));
    GaussianState ukf_state = ekf_state;
    Eigen::VectorXd ref_mean = mean0;
    Eigen::MatrixXd ref_cov = Eigen::MatrixXd::Identity(d, d);

    double worst = 0.0;
    for (int k = 0; k < 30; ++k) {
        Eigen::VectorXd y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            y[i] = gauss(rng);
        }
        ekf_state = ekf_update(ekf_predict(ekf_state, dyn, k), meas, y, k).first;
        ukf_state = ukf_update(ukf_predict(ukf_state, dyn, k), meas, y, k).first;

        ref_mean = f * ref_mean;
        ref_cov = f * ref_cov * f.transpose() + q;
        const Eigen::MatrixXd s = h * ref_cov * h.transpose() + r;
        const Eigen::MatrixXd gain =
            Eigen::LLT<Eigen::MatrixXd>(s).solve(h * ref_cov).transpose();
        ref_mean += gain * (y - h * ref_mean);
        ref_cov -= gain * s * gain.transpose();

        for (const GaussianState* st : {&ekf_state, &ukf_state}) {
            worst = std::max(worst, (st->mean - ref_mean).cwiseAbs().maxCoeff());
            worst = std::max(worst, (st->cov - ref_cov).cwiseAbs().maxCoeff());
        }
    }
    return make_property("linear-kf-equivalence", 1e-8, worst);
}

/// Analytic projection Jacobian against central differences, away from the
/// saturation junction and the guard disc where the derivative jumps.
inline SelftestProperty slam_jacobian_agreement() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const slam2d::CameraIntrinsics2d intr;
    const slam2d::Slam2dLayout layout{1};
    const double phi_sat = std::atan2(intr.saturation_halfwidth, intr.focal);

    double worst = 0.0;
    int accepted = 0;
    while (accepted < 200) {
        Eigen::VectorXd x(layout.dim());
        x << 2.0 * u(rng), 2.0 * u(rng), std::numbers::pi * u(rng), 6.0 * u(rng),
            6.0 * u(rng);
        const Eigen::Vector2d cam_point = slam2d::camera_frame_point(
            x.head<2>(), x[2], x.segment<2>(3));
        const double phi = std::atan2(cam_point[0], cam_point[1]);
        if (cam_point.norm() < 0.05 ||
            std::abs(std::abs(phi) - phi_sat) < 1e-3 ||
            std::numbers::pi - std::abs(phi) < 1e-3) {
            continue;
        }
        ++accepted;
        const auto model = slam2d::stacked_measurement_model(layout, {0}, intr, 0.05);
        const Eigen::MatrixXd fd = finite_difference_jacobian(
            [&](const Eigen::VectorXd& xi) { return model.h(xi, 0); }, x);
        const Eigen::RowVectorXd analytic =
            slam2d::measurement_jacobian(x, 0, intr, layout);
        worst = std::max(worst, (fd.row(0) - analytic).cwiseAbs().maxCoeff());
    }
    return make_property("slam-jacobian-fd-agreement", 2e-5, worst);
}

inline SelftestProperty procrustes_recovery() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Eigen::Vector2d> gt;
        for (int i = 0; i < 12; ++i) {
            gt.emplace_back(5.0 * u(rng), 5.0 * u(rng));
        }
        const double s = 0.3 + 2.0 * std::abs(u(rng));
        const Eigen::Matrix2d rot = slam2d::rotation_matrix(std::numbers::pi * u(rng));
        const Eigen::Vector2d shift(3.0 * u(rng), 3.0 * u(rng));
        std::vector<Eigen::Vector2d> est;
        for (const auto& p : gt) {
            est.push_back(s * rot * p + shift);
        }
        const auto t = bench::procrustes_align(est, gt);
        for (std::size_t i = 0; i < gt.size(); ++i) {
            worst = std::max(worst, (t.apply(est[i]) - gt[i]).norm());
        }
    }
    return make_property("procrustes-recovery", 1e-9, worst);
}

inline SelftestProperty omega_orthogonality() {
    std::mt19937_64 rng(505);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> mag(0.0, std::numbers::pi);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
        dir.normalize();
        // sweep across magnitudes including the series branch near zero
        const double scale = trial % 5 == 0 ? 1e-12 * mag(rng) : mag(rng);
        const Eigen::Matrix4d omega = imu::omega_matrix(scale * dir);
        worst = std::max(worst, (omega.transpose() * omega -
                                 Eigen::Matrix4d::Identity())
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    return make_property("omega-orthogonality", 1e-12, worst);
}

inline SelftestProperty quaternion_norm_drift() {
    std::mt19937_64 rng(606);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(imu::VioLayout::kDim);
    x.segment<4>(imu::VioLayout::kQuat) << 1.0, 0.0, 0.0, 0.0;
    x.segment<3>(imu::VioLayout::kAccelScale).setOnes();
    const Eigen::Vector3d gravity(0.0, 0.0, 9.81);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        imu::ImuSample sample;
        sample.omega = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        sample.accel = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        sample.dt = 1e-3;
        x = imu::mechanize(x, sample, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                           gravity);
        worst = std::max(worst,
                         std::abs(imu::VioLayout::quaternion(x).norm() - 1.0));
    }
    return make_property("quaternion-norm-drift", 1e-9, worst);
}

inline SelftestProperty constant_rate_rotation() {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(imu::VioLayout::kDim);
    x.segment<4>(imu::VioLayout::kQuat) << 1.0, 0.0, 0.0, 0.0;
    x.segment<3>(imu::VioLayout::kAccelScale).setOnes();
    imu::ImuSample sample;
    sample.omega = Eigen::Vector3d(0.0, 0.0, std::numbers::pi / 2.0);
    sample.accel = Eigen::Vector3d::Zero();
    sample.dt = 1e-3;
    const Eigen::Vector3d gravity = Eigen::Vector3d::Zero();
    for (int k = 0; k < 1000; ++k) {
        x = imu::mechanize(x, sample, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                           gravity);
    }
    Eigen::Vector4d q = imu::VioLayout::quaternion(x);
    Eigen::Vector4d ref =
        imu::from_axis_angle(Eigen::Vector3d::UnitZ(), std::numbers::pi / 2.0);
    if (q.dot(ref) < 0.0) {
        q = -q;
    }
    return make_property("constant-rate-rotation", 1e-6,
                         (q - ref).cwiseAbs().maxCoeff());
}

/// The saturating projection must stay within its closed-form bound and be
/// strictly increasing in the bearing at every radius.
inline SelftestProperty extended_projection_bounds() {
    const slam2d::CameraIntrinsics2d intr;
    const double phi_sat = std::atan2(intr.saturation_halfwidth, intr.focal);
    const double slope = intr.focal +
                         intr.saturation_halfwidth * intr.saturation_halfwidth / intr.focal;
    const double bound = intr.saturation_halfwidth +
                         slope * (std::numbers::pi - phi_sat);
    double worst = 0.0;
    for (const double radius : {0.01, 0.5, 3.0, 30.0}) {
        double prev = 0.0;
        bool have_prev = false;
        for (int i = 0; i <= 2000; ++i) {
            const double phi = -std::numbers::pi + 1e-9 +
                               (2.0 * std::numbers::pi - 2e-9) * i / 2000.0;
            const Eigen::Vector2d cam_point(radius * std::sin(phi),
                                            radius * std::cos(phi));
            const double y = slam2d::detail::project_extended(cam_point, intr);
            worst = std::max(worst, std::abs(y - intr.principal) - bound);
            if (have_prev) {
                worst = std::max(worst, prev - y);  // must not decrease
            }
            prev = y;
            have_prev = true;
        }
    }
    return make_property("extended-projection-bounds", 1e-12, worst);
}

}  // namespace selftest_detail

inline SelftestReport run_selftest() {
    SelftestReport report;
    report.properties.push_back(selftest_detail::cubature_exactness());
    report.properties.push_back(selftest_detail::linear_kf_equivalence());
    report.properties.push_back(selftest_detail::slam_jacobian_agreement());
    report.properties.push_back(selftest_detail::procrustes_recovery());
    report.properties.push_back(selftest_detail::omega_orthogonality());
    report.properties.push_back(selftest_detail::quaternion_norm_drift());
    report.properties.push_back(selftest_detail::constant_rate_rotation());
    report.properties.push_back(selftest_detail::extended_projection_bounds());
    return report;
}

inline void print_selftest(std::ostream& out, const SelftestReport& report) {
    for (const auto& p : report.properties) {
        out << (p.passed ? "[PASS] " : "[FAIL] ") << p.name << "  observed "
            << p.observed << "  tolerance " << p.tolerance << "\n";
    }
}

}  // namespace adfslam
