#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "adfslam/core/cubature.hpp"
#include "adfslam/core/errors.hpp"

namespace adfslam {

/// Central-difference Jacobian of g at x. A non-positive `step` selects the
/// default per-coordinate step max(1e-6, 1e-6*|x_i|).
inline Eigen::MatrixXd finite_difference_jacobian(const VectorFunction& g,
                                                  const Eigen::VectorXd& x,
                                                  double step = -1.0) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd jac;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = step > 0.0 ? step : std::max(1e-6, 1e-6 * std::abs(x[i]));
        Eigen::VectorXd lo = x;
        Eigen::VectorXd hi = x;
        lo[i] -= h;
        hi[i] += h;
        const Eigen::VectorXd g_hi = g(hi);
        const Eigen::VectorXd g_lo = g(lo);
        if (!g_hi.allFinite() || !g_lo.allFinite()) {
            throw NumericError("finite_difference_jacobian: non-finite evaluation", i);
        }
        if (jac.size() == 0) {
            jac.resize(g_hi.size(), n);
        }
        if (g_hi.size() != jac.rows() || g_lo.size() != jac.rows()) {
            throw DimensionError("finite_difference_jacobian: inconsistent output dimension");
        }
        jac.col(i) = (g_hi - g_lo) / (2.0 * h);
    }
    if (n == 0) {
        jac.resize(g(x).size(), 0);
    }
    return jac;
}

}  // namespace adfslam
