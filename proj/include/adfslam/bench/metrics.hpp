#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "adfslam/core/errors.hpp"

namespace adfslam::bench {

class DegenerateAlignmentError : public FilterError {
public:
    using FilterError::FilterError;
};

struct SimilarityTransform {
    double scale = 1.0;
    Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
    Eigen::Vector2d translation = Eigen::Vector2d::Zero();

    Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
        return scale * rotation * p + translation;
    }
};

/// Least-squares similarity transform (no reflection) minimizing
/// sum_i | s R est_i + t - gt_i |^2, via the closed-form Umeyama solution.
inline SimilarityTransform procrustes_align(const std::vector<Eigen::Vector2d>& est,
                                            const std::vector<Eigen::Vector2d>& gt) {
    if (est.size() != gt.size()) {
        throw DimensionError("procrustes_align: point counts differ");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(est.size());
    if (n < 2) {
        throw DegenerateAlignmentError("procrustes_align: need at least 2 point pairs");
    }
    Eigen::Matrix2Xd src(2, n);
    Eigen::Matrix2Xd dst(2, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        src.col(i) = est[static_cast<std::size_t>(i)];
        dst.col(i) = gt[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d src_mean = src.rowwise().mean();
    const Eigen::Vector2d dst_mean = dst.rowwise().mean();
    const double src_var = (src.colwise() - src_mean).squaredNorm();
    const double dst_var = (dst.colwise() - dst_mean).squaredNorm();
    if (src_var <= 1e-24 || dst_var <= 1e-24) {
        throw DegenerateAlignmentError("procrustes_align: coincident point set");
    }

    const Eigen::Matrix3d m = Eigen::umeyama(src, dst, true);
    SimilarityTransform t;
    const Eigen::Matrix2d sr = m.topLeftCorner<2, 2>();
    t.scale = std::sqrt(sr.determinant());
    t.rotation = sr / t.scale;
    t.translation = m.topRightCorner<2, 1>();
    if (!std::isfinite(t.scale) || t.scale <= 0.0) {
        throw DegenerateAlignmentError("procrustes_align: degenerate solution");
    }
    return t;
}

/// sqrt(mean squared distance) / normalizer.
inline double rmse_normalized(const std::vector<Eigen::Vector2d>& aligned,
                              const std::vector<Eigen::Vector2d>& gt,
                              double normalizer) {
    if (aligned.size() != gt.size()) {
        throw DimensionError("rmse_normalized: point counts differ");
    }
    if (aligned.empty()) {
        throw DimensionError("rmse_normalized: empty point set");
    }
    if (!(normalizer > 0.0)) {
        throw NumericError("rmse_normalized: normalizer must be positive");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < aligned.size(); ++i) {
        sum += (aligned[i] - gt[i]).squaredNorm();
    }
    return std::sqrt(sum / static_cast<double>(aligned.size())) / normalizer;
}

}  // namespace adfslam::bench
