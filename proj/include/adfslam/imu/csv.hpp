#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adfslam/core/errors.hpp"
#include "adfslam/imu/state.hpp"

namespace adfslam::imu {

class ImuCsvError : public FilterError {
public:
    using FilterError::FilterError;
};

/// One raw CSV row: t_ns, wx, wy, wz, ax, ay, az.
struct ImuRecord {
    std::int64_t t_ns{0};
    Eigen::Vector3d omega{Eigen::Vector3d::Zero()};
    Eigen::Vector3d accel{Eigen::Vector3d::Zero()};
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

inline double parse_field(const std::string& field, long line_no) {
    const std::string t = trim(field);
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(t, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (t.empty() || pos != t.size()) {
        throw ImuCsvError("imu csv line " + std::to_string(line_no) +
                          ": bad numeric field '" + field + "'");
    }
    return value;
}

}  // namespace detail

/// Parses the `t_ns, wx, wy, wz, ax, ay, az` layout. '#'-prefixed and blank
/// lines are skipped; timestamps must be strictly increasing.
inline std::vector<ImuRecord> read_imu_records(std::istream& in) {
    std::vector<ImuRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = detail::trim(line);
        if (body.empty() || body[0] == '#') {
            continue;
        }
        std::stringstream row(body);
        std::string field;
        std::vector<double> values;
        while (std::getline(row, field, ',')) {
            values.push_back(detail::parse_field(field, line_no));
        }
        if (values.size() != 7) {
            throw ImuCsvError("imu csv line " + std::to_string(line_no) + ": expected 7 fields, got " +
                              std::to_string(values.size()));
        }
        ImuRecord rec;
        rec.t_ns = static_cast<std::int64_t>(values[0]);
        rec.omega = Eigen::Vector3d(values[1], values[2], values[3]);
        rec.accel = Eigen::Vector3d(values[4], values[5], values[6]);
        if (!records.empty() && rec.t_ns <= records.back().t_ns) {
            throw ImuCsvError("imu csv line " + std::to_string(line_no) +
                              ": timestamps must be strictly increasing");
        }
        records.push_back(rec);
    }
    return records;
}

inline std::vector<ImuRecord> read_imu_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ImuCsvError("cannot open imu csv '" + path + "'");
    }
    return read_imu_records(in);
}

/// N records yield N-1 propagation steps: step j integrates record j+1's
/// readings over the gap to record j.
inline std::vector<ImuSample> to_samples(const std::vector<ImuRecord>& records) {
    std::vector<ImuSample> samples;
    for (std::size_t j = 1; j < records.size(); ++j) {
        ImuSample s;
        s.omega = records[j].omega;
        s.accel = records[j].accel;
        s.dt = static_cast<double>(records[j].t_ns - records[j - 1].t_ns) * 1e-9;
        samples.push_back(s);
    }
    return samples;
}

}  // namespace adfslam::imu
