#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace adfslam::cli {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Threshold from ADF_SLAM_LOG (error|info|debug); unset or unrecognized
/// values fall back to info.
inline LogLevel log_threshold_from_env() {
    const char* raw = std::getenv("ADF_SLAM_LOG");
    if (raw == nullptr) {
        return LogLevel::kInfo;
    }
    const std::string value(raw);
    if (value == "error") {
        return LogLevel::kError;
    }
    if (value == "debug") {
        return LogLevel::kDebug;
    }
    return LogLevel::kInfo;
}

class Logger {
public:
    explicit Logger(LogLevel threshold = log_threshold_from_env()) : threshold_(threshold) {}

    void error(const std::string& msg) const { emit(LogLevel::kError, "error", msg); }
    void info(const std::string& msg) const { emit(LogLevel::kInfo, "info", msg); }
    void debug(const std::string& msg) const { emit(LogLevel::kDebug, "debug", msg); }

private:
    void emit(LogLevel level, const char* tag, const std::string& msg) const {
        if (static_cast<int>(level) <= static_cast<int>(threshold_)) {
            std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
        }
    }

    LogLevel threshold_;
};

}  // namespace adfslam::cli
