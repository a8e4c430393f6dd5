#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "adfslam/core/ekf.hpp"
#include "adfslam/core/ukf.hpp"
#include "support/oracles.hpp"

using adfslam::FunctionalDynamicsModel;
using adfslam::FunctionalMeasurementModel;
using adfslam::GaussianState;
using adfslam::InnovationStats;
using adfslam::kalman_update_core;
using adfslam::SingularInnovationError;

namespace {

GaussianState scalar_state(double m, double p) {
    return GaussianState(Eigen::VectorXd::Constant(1, m), Eigen::MatrixXd::Constant(1, 1, p));
}

FunctionalDynamicsModel additive_identity_dynamics(double q) {
    return FunctionalDynamicsModel(
        1, 1,
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& e, int) -> Eigen::VectorXd {
            return x + e;
        },
        Eigen::MatrixXd::Constant(1, 1, q));
}

}  // namespace

TEST_CASE("kalman core with zero cross covariance is a no-op") {
    GaussianState pred = scalar_state(2.0, 3.0);
    InnovationStats stats{Eigen::VectorXd::Constant(1, 1.0),
                          Eigen::MatrixXd::Constant(1, 1, 2.0),
                          Eigen::MatrixXd::Zero(1, 1)};
    const auto post = kalman_update_core(pred, stats, Eigen::VectorXd::Constant(1, 9.0));
    CHECK(post.mean[0] == Catch::Approx(2.0));
    CHECK(post.cov(0, 0) == Catch::Approx(3.0));
}

TEST_CASE("kalman core scalar arithmetic") {
    // P- = 1, S = 2, C = 1, y - mu = 2 -> K = 0.5, m = m- + 1, P = 0.5.
    GaussianState pred = scalar_state(0.0, 1.0);
    InnovationStats stats{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 2.0),
                          Eigen::MatrixXd::Constant(1, 1, 1.0)};
    const auto post = kalman_update_core(pred, stats, Eigen::VectorXd::Constant(1, 2.0));
    CHECK(post.mean[0] == Catch::Approx(1.0));
    CHECK(post.cov(0, 0) == Catch::Approx(0.5));
}

TEST_CASE("kalman core rejects a singular innovation") {
    GaussianState pred = scalar_state(0.0, 1.0);
    InnovationStats stats{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1),
                          Eigen::MatrixXd::Constant(1, 1, 1.0)};
    CHECK_THROWS_AS(kalman_update_core(pred, stats, Eigen::VectorXd::Zero(1)),
                    SingularInnovationError);
}

TEST_CASE("posterior trace never exceeds prior trace") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index d = 1 + trial % 5;
        const Eigen::Index m = 1 + trial % 3;
        GaussianState pred(test_oracles::random_vector(d, rng),
                           test_oracles::random_spd(d, rng));
        Eigen::MatrixXd hx(m, d);
        for (Eigen::Index i = 0; i < m; ++i) {
            hx.row(i) = test_oracles::random_vector(d, rng).transpose();
        }
        InnovationStats stats;
        stats.mean = test_oracles::random_vector(m, rng);
        stats.cov = hx * pred.cov * hx.transpose() + test_oracles::random_spd(m, rng);
        stats.cross_cov = pred.cov * hx.transpose();
        const auto post = kalman_update_core(pred, stats, test_oracles::random_vector(m, rng));
        CHECK(post.cov.trace() <= pred.cov.trace() + 1e-12 * pred.cov.trace());
        CHECK((post.cov - post.cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("ukf predict on identity-plus-noise dynamics") {
    const auto dyn = additive_identity_dynamics(0.1);
    const auto pred = adfslam::ukf_predict(scalar_state(2.0, 1.0), dyn, 0);
    CHECK(pred.mean[0] == Catch::Approx(2.0).margin(1e-10));
    CHECK(pred.cov(0, 0) == Catch::Approx(1.1).margin(1e-10));
}

TEST_CASE("ukf predict matches the closed-form linear prediction") {
    // f = 0.5 x + eps, N(2, 1), Q = 0.1 -> N(1, 0.35).
    FunctionalDynamicsModel dyn(
        1, 1,
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& e, int) -> Eigen::VectorXd {
            return 0.5 * x + e;
        },
        Eigen::MatrixXd::Constant(1, 1, 0.1));
    const auto pred = adfslam::ukf_predict(scalar_state(2.0, 1.0), dyn, 0);
    CHECK(pred.mean[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(pred.cov(0, 0) == Catch::Approx(0.35).margin(1e-12));
}

TEST_CASE("ukf predict of an odd map through a symmetric density has zero mean") {
    FunctionalDynamicsModel dyn(
        1, 1,
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& e, int) {
            return Eigen::VectorXd::Constant(1, std::sin(x[0]) + e[0]);
        },
        Eigen::MatrixXd::Constant(1, 1, 0.02));
    const auto pred = adfslam::ukf_predict(scalar_state(0.0, 0.5), dyn, 0);
    CHECK(pred.mean[0] == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("ukf predict with zero noise dimension equals a plain moment transform") {
    std::mt19937_64 rng(5);
    const Eigen::VectorXd m = test_oracles::random_vector(3, rng);
    const Eigen::MatrixXd p = test_oracles::random_spd(3, rng);
    const auto map = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return x.array().sin().matrix() + 0.1 * x;
    };
    FunctionalDynamicsModel dyn(
        3, 0,
        [&](const Eigen::VectorXd& x, const Eigen::VectorXd&, int) { return map(x); },
        Eigen::MatrixXd::Zero(0, 0));
    const GaussianState state(m, p);
    const auto pred = adfslam::ukf_predict(state, dyn, 0);
    const auto direct = adfslam::transform_moments(map, state);
    CHECK((pred.mean - direct.mean).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((pred.cov - direct.cov).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("ukf update with identity measurement and zero innovation") {
    const double p = 1.7, r = 0.4, m = -0.3;
    FunctionalMeasurementModel meas(
        1, [](const Eigen::VectorXd& x, int) { return x; },
        Eigen::MatrixXd::Constant(1, 1, r));
    const auto [post, stats] =
        adfslam::ukf_update(scalar_state(m, p), meas, Eigen::VectorXd::Constant(1, m), 0);
    CHECK(post.mean[0] == Catch::Approx(m).margin(1e-12));
    CHECK(post.cov(0, 0) == Catch::Approx(p - p * p / (p + r)).margin(1e-12));
    CHECK(stats.mean[0] == Catch::Approx(m).margin(1e-12));
    CHECK(stats.cov(0, 0) == Catch::Approx(p + r).margin(1e-12));
}

TEST_CASE("ukf update equals the linear Kalman update for linear h") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 2 + trial % 3;
        const Eigen::Index m = 1 + trial % 2;
        const Eigen::VectorXd mean = test_oracles::random_vector(d, rng);
        const Eigen::MatrixXd cov = test_oracles::random_spd(d, rng);
        Eigen::MatrixXd hx(m, d);
        for (Eigen::Index i = 0; i < m; ++i) {
            hx.row(i) = test_oracles::random_vector(d, rng).transpose();
        }
        const Eigen::MatrixXd r = test_oracles::random_spd(m, rng);
        const Eigen::VectorXd y = test_oracles::random_vector(m, rng);

        FunctionalMeasurementModel meas(
            m, [&](const Eigen::VectorXd& x, int) -> Eigen::VectorXd { return hx * x; }, r);
        const auto [post, stats] = adfslam::ukf_update(GaussianState(mean, cov), meas, y, 0);

        Eigen::VectorXd om = mean;
        Eigen::MatrixXd op = cov;
        test_oracles::LinearKalmanOracle oracle{Eigen::MatrixXd(), Eigen::MatrixXd(),
                                                Eigen::MatrixXd(), hx, r};
        oracle.update(om, op, y);
        CHECK((post.mean - om).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((post.cov - op).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("ukf update of the 1D projection core agrees with a Monte Carlo oracle") {
    // h(x) = f x1/x2 around a well-conditioned depth; the oracle computes the
    // exact moment-matched posterior by sampling the predictive density and
    // batches the samples to estimate its own standard error.
    const double f = 1.5, r = 0.01, y_obs = 0.1;
    const Eigen::Vector2d mean(0.0, 2.0);
    const Eigen::Matrix2d cov = Eigen::Vector2d(0.01, 0.01).asDiagonal();

    FunctionalMeasurementModel meas(
        1,
        [&](const Eigen::VectorXd& x, int) {
            return Eigen::VectorXd::Constant(1, f * x[0] / x[1]);
        },
        Eigen::MatrixXd::Constant(1, 1, r));
    const auto [post, stats] =
        adfslam::ukf_update(GaussianState(mean, cov), meas,
                            Eigen::VectorXd::Constant(1, y_obs), 0);

    constexpr int kBatches = 10;
    constexpr int kPerBatch = 100000;
    std::mt19937_64 rng(90210);
    std::normal_distribution<double> normal;
    Eigen::Matrix2d l = cov.llt().matrixL();

    Eigen::Vector2d batch_post_mean[kBatches];
    for (int b = 0; b < kBatches; ++b) {
        double mu = 0.0, s_raw = 0.0;
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        Eigen::Matrix<double, 2, Eigen::Dynamic> xs(2, kPerBatch);
        Eigen::VectorXd hs(kPerBatch);
        for (int i = 0; i < kPerBatch; ++i) {
            const Eigen::Vector2d x = mean + l * Eigen::Vector2d(normal(rng), normal(rng));
            xs.col(i) = x;
            hs[i] = f * x[0] / x[1];
            mu += hs[i];
        }
        mu /= kPerBatch;
        for (int i = 0; i < kPerBatch; ++i) {
            const double dh = hs[i] - mu;
            s_raw += dh * dh;
            c += (xs.col(i) - mean) * dh;
        }
        const double s = s_raw / kPerBatch + r;
        c /= kPerBatch;
        batch_post_mean[b] = mean + c / s * (y_obs - mu);
    }

    Eigen::Vector2d oracle_mean = Eigen::Vector2d::Zero();
    for (const auto& v : batch_post_mean) oracle_mean += v;
    oracle_mean /= kBatches;
    Eigen::Vector2d se = Eigen::Vector2d::Zero();
    for (const auto& v : batch_post_mean) se += (v - oracle_mean).cwiseAbs2();
    se = (se / (kBatches - 1) / kBatches).cwiseSqrt();

    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(post.mean[i] - oracle_mean[i]) < 3.0 * se[i] + 1e-4);
    }
}

TEST_CASE("ekf predict is exact on linear dynamics") {
    std::mt19937_64 rng(41);
    const Eigen::Index d = 4;
    Eigen::MatrixXd a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        a.row(i) = test_oracles::random_vector(d, rng).transpose();
    }
    const Eigen::MatrixXd q = test_oracles::random_spd(d, rng);
    FunctionalDynamicsModel dyn(
        d, d,
        [&](const Eigen::VectorXd& x, const Eigen::VectorXd& e, int) -> Eigen::VectorXd {
            return a * x + e;
        },
        q);
    dyn.set_jacobians(a, Eigen::MatrixXd::Identity(d, d));

    const Eigen::VectorXd m = test_oracles::random_vector(d, rng);
    const Eigen::MatrixXd p = test_oracles::random_spd(d, rng);
    const auto pred = adfslam::ekf_predict(GaussianState(m, p), dyn, 0);
    CHECK((pred.mean - a * m).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pred.cov - (a * p * a.transpose() + q)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ekf predict linearizes sin at the mean") {
    FunctionalDynamicsModel dyn(
        1, 1,
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& e, int) {
            return Eigen::VectorXd::Constant(1, std::sin(x[0]) + e[0]);
        },
        Eigen::MatrixXd::Zero(1, 1));
    const auto pred = adfslam::ekf_predict(scalar_state(0.0, 0.01), dyn, 0);
    CHECK(pred.mean[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(pred.cov(0, 0) == Catch::Approx(0.01).margin(1e-9));
}

TEST_CASE("ekf predict with identity dynamics adds the process noise") {
    const auto dyn = additive_identity_dynamics(0.3);
    const auto pred = adfslam::ekf_predict(scalar_state(-1.0, 2.0), dyn, 0);
    CHECK(pred.mean[0] == Catch::Approx(-1.0).margin(1e-9));
    CHECK(pred.cov(0, 0) == Catch::Approx(2.3).margin(1e-7));
}

TEST_CASE("ekf update matches the closed-form linear update") {
    std::mt19937_64 rng(59);
    const Eigen::Index d = 3, m = 2;
    const Eigen::VectorXd mean = test_oracles::random_vector(d, rng);
    const Eigen::MatrixXd cov = test_oracles::random_spd(d, rng);
    Eigen::MatrixXd hx(m, d);
    hx << 1.0, 0.0, 2.0, 0.0, -1.0, 0.5;
    const Eigen::MatrixXd r = test_oracles::random_spd(m, rng);
    const Eigen::VectorXd y = test_oracles::random_vector(m, rng);

    FunctionalMeasurementModel meas(
        m, [&](const Eigen::VectorXd& x, int) -> Eigen::VectorXd { return hx * x; }, r);
    meas.set_jacobian(hx);
    const auto [post, stats] = adfslam::ekf_update(GaussianState(mean, cov), meas, y, 0);

    Eigen::VectorXd om = mean;
    Eigen::MatrixXd op = cov;
    test_oracles::LinearKalmanOracle oracle{Eigen::MatrixXd(), Eigen::MatrixXd(),
                                            Eigen::MatrixXd(), hx, r};
    oracle.update(om, op, y);
    CHECK((post.mean - om).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((post.cov - op).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ekf update with zero innovation keeps the mean, contracts the covariance") {
    FunctionalMeasurementModel meas(
        1,
        [](const Eigen::VectorXd& x, int) {
            return Eigen::VectorXd::Constant(1, std::atan(x[0]));
        },
        Eigen::MatrixXd::Constant(1, 1, 0.1));
    GaussianState state = scalar_state(0.7, 0.5);
    const Eigen::VectorXd y = meas.h(state.mean, 0);
    const auto [post, stats] = adfslam::ekf_update(state, meas, y, 0);
    CHECK(post.mean[0] == Catch::Approx(0.7).margin(1e-12));
    CHECK(post.cov(0, 0) < 0.5);
}

TEST_CASE("ekf update hand-evaluated on a cubic measurement") {
    // h(x) = x^3 at m- = 1, P- = 0.01, R = 0.01, y = 1.1:
    // H = 3, S = 0.1, K = 0.3, posterior mean 1.03.
    FunctionalMeasurementModel meas(
        1,
        [](const Eigen::VectorXd& x, int) {
            return Eigen::VectorXd::Constant(1, x[0] * x[0] * x[0]);
        },
        Eigen::MatrixXd::Constant(1, 1, 0.01));
    const auto [post, stats] = adfslam::ekf_update(scalar_state(1.0, 0.01), meas,
                                                   Eigen::VectorXd::Constant(1, 1.1), 0);
    CHECK(stats.cov(0, 0) == Catch::Approx(0.1).margin(1e-7));
    CHECK(post.mean[0] == Catch::Approx(1.03).margin(1e-6));
}

TEST_CASE("full EKF and UKF passes track the closed-form KF on linear models") {
    std::mt19937_64 rng(314159);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index d = 1 + trial % 6;
        const Eigen::Index m = 1 + trial % 4;

        Eigen::MatrixXd a(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            a.row(i) = test_oracles::random_vector(d, rng).transpose();
        }
        a *= 0.9 / std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff());
        Eigen::MatrixXd h(m, d);
        for (Eigen::Index i = 0; i < m; ++i) {
            h.row(i) = test_oracles::random_vector(d, rng).transpose();
        }
        const Eigen::MatrixXd q = test_oracles::random_spd(d, rng, 0.05);
        const Eigen::MatrixXd r = test_oracles::random_spd(m, rng, 0.05);
        const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(d, d);

        FunctionalDynamicsModel dyn(
            d, d,
            [&](const Eigen::VectorXd& x, const Eigen::VectorXd& e, int) -> Eigen::VectorXd {
                return a * x + e;
            },
            q);
        dyn.set_jacobians(a, g);
        FunctionalMeasurementModel meas(
            m, [&](const Eigen::VectorXd& x, int) -> Eigen::VectorXd { return h * x; }, r);
        meas.set_jacobian(h);
        test_oracles::LinearKalmanOracle oracle{a, g, q, h, r};

        GaussianState ekf_state(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d));
        GaussianState ukf_state = ekf_state;
        Eigen::VectorXd km = ekf_state.mean;
        Eigen::MatrixXd kp = ekf_state.cov;

        for (int k = 0; k < 30; ++k) {
            Eigen::VectorXd y(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                y[i] = normal(rng);
            }
            oracle.predict(km, kp);
            oracle.update(km, kp, y);
            ekf_state = adfslam::ekf_predict(ekf_state, dyn, k);
            ekf_state = adfslam::ekf_update(ekf_state, meas, y, k).first;
            ukf_state = adfslam::ukf_predict(ukf_state, dyn, k);
            ukf_state = adfslam::ukf_update(ukf_state, meas, y, k).first;

            CHECK((ekf_state.mean - km).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((ukf_state.mean - km).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((ekf_state.cov - kp).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((ukf_state.cov - kp).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("default finite-difference Jacobians agree with analytic ones") {
    FunctionalDynamicsModel dyn(
        2, 2,
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& e, int) {
            Eigen::VectorXd out(2);
            out[0] = std::sin(x[0]) + 0.5 * x[1] + e[0];
            out[1] = x[0] * x[1] + 2.0 * e[1];
            return out;
        },
        Eigen::MatrixXd::Identity(2, 2));

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd x = test_oracles::random_vector(2, rng, 2.0);
        Eigen::MatrixXd fx_true(2, 2);
        fx_true << std::cos(x[0]), 0.5, x[1], x[0];
        Eigen::MatrixXd feps_true(2, 2);
        feps_true << 1.0, 0.0, 0.0, 2.0;
        CHECK((dyn.jacobian_x(x, 0) - fx_true).cwiseAbs().maxCoeff() < 1e-5);
        CHECK((dyn.jacobian_eps(x, 0) - feps_true).cwiseAbs().maxCoeff() < 1e-5);
    }
}
