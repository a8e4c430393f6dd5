#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "adfslam/bench/runner.hpp"
#include "adfslam/bench/scenario.hpp"
#include "adfslam/core/errors.hpp"

namespace adfslam::bench {

class IoError : public FilterError {
public:
    using FilterError::FilterError;
};

/// Shortest round-trippable decimal form; identical across runs.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const char* results_csv_header() {
    return "experiment,mode,level,seed,path_rmse,map_rmse,diverged,n_steps,"
           "n_landmarks,wall_ms";
}

inline void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << results_csv_header() << '\n';
    for (const SweepRow& row : rows) {
        out << row.experiment << ',' << to_string(row.mode) << ','
            << format_double(row.level) << ',' << row.seed << ','
            << format_double(row.result.path_rmse) << ','
            << format_double(row.result.map_rmse) << ','
            << (row.result.diverged ? 1 : 0) << ',' << row.n_steps << ','
            << row.n_landmarks << ',' << format_double(row.result.wall_ms) << '\n';
    }
}

inline const char* aggregates_csv_header() {
    return "experiment,mode,level,n_runs,n_diverged,path_rmse_mean,path_rmse_std,"
           "map_rmse_mean,map_rmse_std";
}

inline void write_aggregates_csv(std::ostream& out,
                                 const std::vector<AggregateRow>& aggregates) {
    out << aggregates_csv_header() << '\n';
    for (const AggregateRow& a : aggregates) {
        out << a.experiment << ',' << to_string(a.mode) << ',' << format_double(a.level)
            << ',' << a.n_runs << ',' << a.n_diverged << ','
            << format_double(a.path_rmse_mean) << ',' << format_double(a.path_rmse_std)
            << ',' << format_double(a.map_rmse_mean) << ','
            << format_double(a.map_rmse_std) << '\n';
    }
}

inline void write_trajectory_csv(std::ostream& out, const Scenario& scenario,
                                 const RunResult& result) {
    out << "step,gt_x,gt_y,gt_theta,est_x,est_y,est_theta,cov_trace\n";
    for (std::size_t k = 0; k < result.est_path.size(); ++k) {
        const Eigen::Vector3d& gt = scenario.gt_path[k];
        const Eigen::Vector3d& est = result.est_path[k];
        out << k << ',' << format_double(gt[0]) << ',' << format_double(gt[1]) << ','
            << format_double(gt[2]) << ',' << format_double(est[0]) << ','
            << format_double(est[1]) << ',' << format_double(est[2]) << ','
            << format_double(result.cov_traces[k]) << '\n';
    }
}

template <typename Writer>
void write_csv_file(const std::string& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    writer(out);
    out.flush();
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

}  // namespace adfslam::bench
