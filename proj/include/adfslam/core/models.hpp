#pragma once

#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "adfslam/core/numdiff.hpp"
#include "adfslam/core/types.hpp"

namespace adfslam {

/// Dynamics x_k = f(x_{k-1}, eps_k) with eps_k ~ N(0, Q_k). Jacobians default
/// to central differences at (x, 0); models with analytic forms override.
class DynamicsModel {
public:
    virtual ~DynamicsModel() = default;

    virtual Eigen::Index state_dim() const = 0;
    virtual Eigen::Index noise_dim() const = 0;

    virtual Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                              int k) const = 0;

    /// Process noise covariance Q_k (noise_dim x noise_dim).
    virtual Eigen::MatrixXd process_noise_cov(int k) const = 0;

    /// d f / d x at (x, 0).
    virtual Eigen::MatrixXd jacobian_x(const Eigen::VectorXd& x, int k) const {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(noise_dim());
        return finite_difference_jacobian(
            [&](const Eigen::VectorXd& xi) { return f(xi, zero, k); }, x);
    }

    /// d f / d eps at (x, 0).
    virtual Eigen::MatrixXd jacobian_eps(const Eigen::VectorXd& x, int k) const {
        return finite_difference_jacobian(
            [&](const Eigen::VectorXd& e) { return f(x, e, k); },
            Eigen::VectorXd::Zero(noise_dim()));
    }
};

/// Measurement y_k = h(x_k) + r_k with r_k ~ N(0, R_k).
class MeasurementModel {
public:
    virtual ~MeasurementModel() = default;

    virtual Eigen::Index meas_dim() const = 0;

    virtual Eigen::VectorXd h(const Eigen::VectorXd& x, int k) const = 0;

    /// Measurement noise covariance R_k (meas_dim x meas_dim).
    virtual Eigen::MatrixXd noise_cov(int k) const = 0;

    /// d h / d x, central differences unless overridden.
    virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, int k) const {
        return finite_difference_jacobian(
            [&](const Eigen::VectorXd& xi) { return h(xi, k); }, x);
    }
};

/// std::function-backed dynamics, convenient for tests and small models.
class FunctionalDynamicsModel : public DynamicsModel {
public:
    using Transition = std::function<Eigen::VectorXd(const Eigen::VectorXd&,
                                                     const Eigen::VectorXd&, int)>;

    FunctionalDynamicsModel(Eigen::Index state_dim, Eigen::Index noise_dim,
                            Transition transition, Eigen::MatrixXd q)
        : state_dim_(state_dim),
          noise_dim_(noise_dim),
          transition_(std::move(transition)),
          q_(std::move(q)) {}

    Eigen::Index state_dim() const override { return state_dim_; }
    Eigen::Index noise_dim() const override { return noise_dim_; }

    Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                      int k) const override {
        return transition_(x, eps, k);
    }

    Eigen::MatrixXd process_noise_cov(int) const override { return q_; }

    /// Install analytic Jacobians (both or none).
    void set_jacobians(Eigen::MatrixXd fx, Eigen::MatrixXd feps) {
        fx_ = std::move(fx);
        feps_ = std::move(feps);
        has_jacobians_ = true;
    }

    Eigen::MatrixXd jacobian_x(const Eigen::VectorXd& x, int k) const override {
        return has_jacobians_ ? fx_ : DynamicsModel::jacobian_x(x, k);
    }

    Eigen::MatrixXd jacobian_eps(const Eigen::VectorXd& x, int k) const override {
        return has_jacobians_ ? feps_ : DynamicsModel::jacobian_eps(x, k);
    }

private:
    Eigen::Index state_dim_;
    Eigen::Index noise_dim_;
    Transition transition_;
    Eigen::MatrixXd q_;
    Eigen::MatrixXd fx_, feps_;
    bool has_jacobians_ = false;
};

/// std::function-backed measurement model.
class FunctionalMeasurementModel : public MeasurementModel {
public:
    using Observation = std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)>;

    FunctionalMeasurementModel(Eigen::Index meas_dim, Observation observation,
                               Eigen::MatrixXd r)
        : meas_dim_(meas_dim), observation_(std::move(observation)), r_(std::move(r)) {}

    Eigen::Index meas_dim() const override { return meas_dim_; }

    Eigen::VectorXd h(const Eigen::VectorXd& x, int k) const override {
        return observation_(x, k);
    }

    Eigen::MatrixXd noise_cov(int) const override { return r_; }

    void set_jacobian(Eigen::MatrixXd hx) {
        hx_ = std::move(hx);
        has_jacobian_ = true;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, int k) const override {
        return has_jacobian_ ? hx_ : MeasurementModel::jacobian(x, k);
    }

private:
    Eigen::Index meas_dim_;
    Observation observation_;
    Eigen::MatrixXd r_;
    Eigen::MatrixXd hx_;
    bool has_jacobian_ = false;
};

}  // namespace adfslam
