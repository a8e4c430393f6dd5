#pragma once

#include <array>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"
#include "adfslam/core/types.hpp"

namespace adfslam {

/// Lower Cholesky factor plus the diagonal jitter that had to be added to
/// obtain it. L * L^T == P + applied_jitter * I.
struct CholeskyResult {
    Eigen::MatrixXd factor;
    double applied_jitter = 0.0;
};

/// Jitter escalation schedule, as multiples of trace(P)/d.
inline constexpr std::array<double, 5> kJitterSchedule = {0.0, 1e-12, 1e-10, 1e-8, 1e-6};

/// Lower-triangular matrix square root of a symmetric matrix. Retries with
/// the smallest diagonal jitter from the escalation schedule that makes the
/// factorization succeed; throws NotPsdError once the schedule is exhausted.
inline CholeskyResult cholesky_sqrt(const Eigen::MatrixXd& p) {
    if (p.rows() != p.cols()) {
        throw DimensionError("cholesky_sqrt: matrix is not square");
    }
    const Eigen::Index d = p.rows();
    if (d == 0) {
        return {Eigen::MatrixXd(0, 0), 0.0};
    }
    if (!p.allFinite()) {
        throw NumericError("cholesky_sqrt: non-finite input matrix");
    }

    const Eigen::MatrixXd sym = symmetrized(p);
    double scale = sym.trace() / static_cast<double>(d);
    if (scale <= 0.0) {
        scale = 1.0;  // zero/negative trace: fall back to absolute jitter
    }

    for (double level : kJitterSchedule) {
        const double jitter = level * scale;
        Eigen::MatrixXd candidate = sym;
        candidate.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(candidate);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd l = llt.matrixL();
            if (l.allFinite()) {
                return {std::move(l), jitter};
            }
        }
    }

    std::ostringstream msg;
    msg << "cholesky_sqrt: matrix not PSD after max jitter (" << kJitterSchedule.back()
        << " * " << scale << ")";
    throw NotPsdError(msg.str());
}

}  // namespace adfslam
