#pragma once

#include <stdexcept>
#include <string>

namespace adfslam {

/// Base class for all recoverable numeric/contract failures in the filters.
class FilterError : public std::runtime_error {
public:
    explicit FilterError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched or invalid vector/matrix dimensions.
class DimensionError : public FilterError {
public:
    explicit DimensionError(const std::string& msg) : FilterError(msg) {}
};

/// Covariance could not be factorized even after the full jitter schedule.
class NotPsdError : public FilterError {
public:
    explicit NotPsdError(const std::string& msg) : FilterError(msg) {}
};

/// A propagated quantity became NaN/Inf. Carries the index of the offending
/// sigma point (or -1 when not applicable).
class NumericError : public FilterError {
public:
    NumericError(const std::string& msg, long point_index = -1)
        : FilterError(msg), point_index_(point_index) {}

    long point_index() const { return point_index_; }

private:
    long point_index_;
};

/// Innovation covariance S is not invertible; the caller decides whether to
/// skip the update.
class SingularInnovationError : public FilterError {
public:
    explicit SingularInnovationError(const std::string& msg) : FilterError(msg) {}
};

}  // namespace adfslam
