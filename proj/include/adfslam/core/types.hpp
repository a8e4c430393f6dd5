#pragma once

#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"

namespace adfslam {

/// Exact symmetrization. 0.5*(a+b) is commutative in IEEE arithmetic, so the
/// result satisfies ||P - P^T||_max == 0 bit-exactly.
inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& p) {
    return 0.5 * (p + p.transpose());
}

/// The assumed density N(m, P): a mean vector and a symmetric covariance.
struct GaussianState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    GaussianState() = default;

    GaussianState(Eigen::VectorXd m, Eigen::MatrixXd p)
        : mean(std::move(m)), cov(std::move(p)) {
        if (cov.rows() != cov.cols() || cov.rows() != mean.size()) {
            throw DimensionError("GaussianState: mean/cov dimensions disagree");
        }
    }

    Eigen::Index dim() const { return mean.size(); }

    void symmetrize() { cov = symmetrized(cov); }

    bool is_finite() const {
        return mean.allFinite() && cov.allFinite();
    }
};

/// Innovation statistics of one measurement update: innovation mean mu,
/// innovation covariance S (measurement noise included) and the
/// state-measurement cross covariance C.
struct InnovationStats {
    Eigen::VectorXd mean;        // mu, length m
    Eigen::MatrixXd cov;         // S, m x m
    Eigen::MatrixXd cross_cov;   // C, d x m
};

}  // namespace adfslam
