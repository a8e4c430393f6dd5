#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "adfslam/bench/csv.hpp"
#include "adfslam/bench/runner.hpp"
#include "adfslam/cli/config.hpp"
#include "adfslam/cli/log.hpp"
#include "adfslam/imu/csv.hpp"
#include "adfslam/imu/mechanization.hpp"
#include "adfslam/imu/quaternion.hpp"
#include "adfslam/selftest.hpp"

namespace {

namespace bench = adfslam::bench;
namespace cli = adfslam::cli;
namespace imu = adfslam::imu;

constexpr int kExitOk = 0;
constexpr int kExitSelftest = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string seeds;
    int parallelism = -1;  // -1 means not given on the command line
    bool dump_trajectories = false;
    std::vector<std::string> overrides;
};

void attach_common(CLI::App* cmd, CommonOpts* opts) {
    cmd->add_option("--config", opts->config_path, "JSON config file");
    cmd->add_option("--out", opts->out_dir, "output directory for CSV artifacts");
    cmd->add_option("--seeds", opts->seeds, "seed count, list, or lo..hi range");
    cmd->add_option("--parallelism", opts->parallelism, "worker count (0 = all cores)");
    cmd->add_flag("--dump-trajectories", opts->dump_trajectories,
                  "also write per-run trajectory CSVs");
    cmd->add_option("--set", opts->overrides, "override a config key (key=value)")
        ->take_all();
}

cli::LoadedConfig resolve_config(const CommonOpts& opts) {
    std::vector<std::string> overrides = opts.overrides;
    if (!opts.seeds.empty()) {
        overrides.push_back("seeds=" + opts.seeds);
    }
    if (opts.parallelism >= 0) {
        overrides.push_back("parallelism=" + std::to_string(opts.parallelism));
    }
    if (opts.dump_trajectories) {
        overrides.push_back("dump_trajectories=true");
    }
    return cli::load_config(opts.config_path, overrides);
}

void echo_config(const cli::Logger& log, const cli::LoadedConfig& cfg) {
    for (const auto& [key, rendered] : cfg.effective) {
        log.info(key + " = " + rendered);
    }
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw bench::IoError("cannot create '" + out_dir + "': " + ec.message());
    }
    return dir;
}

int resolved_workers(const cli::LoadedConfig& cfg) {
    if (cfg.parallelism > 0) {
        return cfg.parallelism;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string format_level(double level) {
    std::ostringstream out;
    out << level;
    return out.str();
}

void dump_sweep_trajectories(const std::filesystem::path& dir,
                             const bench::SweepResult& result,
                             const bench::ScenarioConfig& base) {
    for (const auto& row : result.rows) {
        if (row.result.diverged) {
            continue;
        }
        bench::ScenarioConfig cfg = base;
        cfg.seed = row.seed;
        const bench::Scenario sc = bench::generate_scenario(cfg);
        const std::string name = "trajectory_" + row.experiment + "_" +
                                 bench::to_string(row.mode) + "_level" +
                                 format_level(row.level) + "_seed" +
                                 std::to_string(row.seed) + ".csv";
        bench::write_csv_file((dir / name).string(), [&](std::ostream& out) {
            bench::write_trajectory_csv(out, sc, row.result);
        });
    }
}

int cmd_run_slam(const cli::Logger& log, const cli::LoadedConfig& cfg,
                 const std::string& out_dir) {
    const auto dir = prepare_out_dir(out_dir);
    const bench::Scenario sc = bench::generate_scenario(cfg.scenario);

    std::vector<bench::FilterMode> modes;
    if (cfg.filter == "ekf" || cfg.filter == "both") {
        modes.push_back(bench::FilterMode::kEkf);
    }
    if (cfg.filter == "ukf" || cfg.filter == "both") {
        modes.push_back(bench::FilterMode::kUkf);
    }

    const double level = cfg.corruption.kind == bench::CorruptionSpec::Kind::kSwap
                             ? cfg.corruption.swap_fraction
                             : cfg.corruption.init_noise_var;
    std::vector<bench::SweepRow> rows;
    for (const auto mode : modes) {
        bench::SweepRow row;
        row.experiment = "run-slam";
        row.mode = mode;
        row.level = level;
        row.seed = cfg.scenario.seed;
        row.n_steps = cfg.scenario.n_steps;
        row.n_landmarks = cfg.scenario.n_landmarks;
        row.result = bench::run_slam(sc, cfg.corruption, mode);
        const auto& r = row.result;
        std::ostringstream line;
        line << bench::to_string(mode) << ": path_rmse=" << r.path_rmse
             << " map_rmse=" << r.map_rmse << " diverged=" << (r.diverged ? 1 : 0)
             << " swaps=" << r.swaps_applied << " wall_ms=" << r.wall_ms;
        std::cout << line.str() << "\n";
        if (cfg.dump_trajectories && !r.diverged) {
            const std::string name = std::string("trajectory_") +
                                     bench::to_string(mode) + "_seed" +
                                     std::to_string(cfg.scenario.seed) + ".csv";
            bench::write_csv_file((dir / name).string(), [&](std::ostream& out) {
                bench::write_trajectory_csv(out, sc, r);
            });
        }
        rows.push_back(std::move(row));
    }
    bench::write_csv_file((dir / "results.csv").string(), [&](std::ostream& out) {
        bench::write_results_csv(out, rows);
    });
    log.info("wrote " + (dir / "results.csv").string());
    return kExitOk;
}

int cmd_sweep(const cli::Logger& log, const cli::LoadedConfig& cfg,
              const std::string& out_dir, bench::CorruptionSpec::Kind kind,
              const std::string& experiment, const std::vector<double>& levels) {
    const auto dir = prepare_out_dir(out_dir);
    bench::SweepPlan plan;
    plan.experiment = experiment;
    plan.base_config = cfg.scenario;
    plan.kind = kind;
    plan.levels = levels;
    plan.seeds = cfg.seeds;
    plan.parallelism = resolved_workers(cfg);

    log.info(experiment + ": " + std::to_string(plan.levels.size()) + " levels x " +
             std::to_string(plan.seeds.size()) + " seeds x 2 modes on " +
             std::to_string(plan.parallelism) + " workers");
    const bench::SweepResult result = bench::sweep(plan);

    int diverged = 0;
    for (const auto& row : result.rows) {
        diverged += row.result.diverged ? 1 : 0;
    }
    std::cout << experiment << ": " << result.rows.size() << " runs, " << diverged
              << " diverged\n";

    bench::write_csv_file((dir / "results.csv").string(), [&](std::ostream& out) {
        bench::write_results_csv(out, result.rows);
    });
    bench::write_csv_file((dir / "aggregates.csv").string(), [&](std::ostream& out) {
        bench::write_aggregates_csv(out, result.aggregates);
    });
    if (cfg.dump_trajectories) {
        dump_sweep_trajectories(dir, result, cfg.scenario);
    }
    log.info("wrote " + (dir / "results.csv").string() + " and " +
             (dir / "aggregates.csv").string());
    return kExitOk;
}

struct ImuTrace {
    bool diverged = false;
    int psd_violations = 0;
    double max_norm_drift = 0.0;
    int steps = 0;
    adfslam::GaussianState state;
};

ImuTrace propagate_imu(const std::vector<imu::ImuSample>& samples, bool use_ukf,
                       const cli::LoadedConfig& cfg, std::ostream& csv,
                       const std::vector<imu::ImuRecord>& records) {
    Eigen::Matrix<double, 6, 6> q = Eigen::Matrix<double, 6, 6>::Zero();
    q.topLeftCorner<3, 3>() =
        cfg.imu_accel_noise_psd * Eigen::Matrix3d::Identity();
    q.bottomRightCorner<3, 3>() =
        cfg.imu_gyro_noise_psd * Eigen::Matrix3d::Identity();

    ImuTrace trace;
    trace.state = imu::make_vio_prior({0, 0, 0}, {0, 0, 0}, {1.0, 0.0, 0.0, 0.0});
    const char* mode = use_ukf ? "ukf" : "ekf";
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto model = imu::vio_dynamics_model(samples[k], q);
        adfslam::GaussianState next = trace.state;
        try {
            next = use_ukf ? adfslam::ukf_predict(next, model, static_cast<int>(k))
                           : adfslam::ekf_predict(next, model, static_cast<int>(k));
        } catch (const adfslam::NumericError&) {
            trace.diverged = true;
            break;
        }
        if (!next.is_finite()) {
            trace.diverged = true;
            break;
        }
        const Eigen::Vector4d raw_q = imu::VioLayout::quaternion(next.mean);
        trace.max_norm_drift =
            std::max(trace.max_norm_drift, std::abs(raw_q.norm() - 1.0));
        next.mean.segment<4>(imu::VioLayout::kQuat) = imu::quat_normalize(raw_q);

        const Eigen::VectorXd eig =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(next.cov).eigenvalues();
        if (eig.minCoeff() < -1e-9) {
            ++trace.psd_violations;
        }
        trace.state = next;
        ++trace.steps;

        const Eigen::Vector3d p = imu::VioLayout::position(next.mean);
        const Eigen::Vector4d quat = imu::VioLayout::quaternion(next.mean);
        csv << k << ',' << records[k + 1].t_ns << ',' << mode << ','
            << bench::format_double(p[0]) << ','
            << bench::format_double(p[1]) << ','
            << bench::format_double(p[2]) << ','
            << bench::format_double(quat[0]) << ','
            << bench::format_double(quat[1]) << ','
            << bench::format_double(quat[2]) << ','
            << bench::format_double(quat[3]) << ','
            << bench::format_double(next.cov.trace()) << '\n';
    }
    return trace;
}

int cmd_imu_check(const cli::Logger& log, const cli::LoadedConfig& cfg,
                  const std::string& out_dir) {
    if (cfg.imu_csv.empty()) {
        throw cli::ConfigError("imu_csv: required for imu-check (--set imu_csv=PATH)");
    }
    const auto dir = prepare_out_dir(out_dir);
    const auto records = imu::read_imu_csv(cfg.imu_csv);
    const auto samples = imu::to_samples(records);
    if (samples.empty()) {
        throw imu::ImuCsvError("imu_csv: needs at least two records");
    }
    log.info("propagating " + std::to_string(samples.size()) + " samples");

    std::ostringstream csv;
    csv << "step,t_ns,mode,px,py,pz,qw,qx,qy,qz,cov_trace\n";
    const ImuTrace ekf = propagate_imu(samples, false, cfg, csv, records);
    const ImuTrace ukf = propagate_imu(samples, true, cfg, csv, records);

    bench::write_csv_file((dir / "imu_check.csv").string(),
                          [&](std::ostream& out) { out << csv.str(); });

    for (const auto& [name, trace] :
         {std::pair<const char*, const ImuTrace*>{"ekf", &ekf},
          std::pair<const char*, const ImuTrace*>{"ukf", &ukf}}) {
        const ImuTrace& t = *trace;
        const Eigen::Vector3d p = imu::VioLayout::position(t.state.mean);
        const Eigen::Vector4d quat = imu::VioLayout::quaternion(t.state.mean);
        std::cout << name << ": steps=" << t.steps
                  << " diverged=" << (t.diverged ? 1 : 0)
                  << " psd_violations=" << t.psd_violations
                  << " max_quat_norm_drift=" << t.max_norm_drift << "\n    final p=("
                  << p[0] << ", " << p[1] << ", " << p[2] << ") q=(" << quat[0] << ", "
                  << quat[1] << ", " << quat[2] << ", " << quat[3]
                  << ") cov_trace=" << t.state.cov.trace() << "\n";
    }
    log.info("wrote " + (dir / "imu_check.csv").string());
    return kExitOk;
}

int cmd_selftest() {
    const adfslam::SelftestReport report = adfslam::run_selftest();
    adfslam::print_selftest(std::cout, report);
    return report.all_passed() ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"assumed-density SLAM workbench"};
    app.require_subcommand(1);

    CommonOpts run_opts, swap_opts, init_opts, imu_opts;
    CLI::App* run_cmd =
        app.add_subcommand("run-slam", "single scenario under EKF and/or UKF");
    attach_common(run_cmd, &run_opts);
    CLI::App* swap_cmd = app.add_subcommand(
        "sweep-swap", "RMSE sweep over the fraction of swapped feature assignments");
    attach_common(swap_cmd, &swap_opts);
    CLI::App* init_cmd = app.add_subcommand(
        "sweep-init-noise", "RMSE sweep over the landmark init-noise variance");
    attach_common(init_cmd, &init_opts);
    CLI::App* imu_cmd =
        app.add_subcommand("imu-check", "propagate an IMU CSV under both predictors");
    attach_common(imu_cmd, &imu_opts);
    app.add_subcommand("selftest", "run the embedded invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const cli::Logger log;
    try {
        if (app.got_subcommand("selftest")) {
            return cmd_selftest();
        }
        const CommonOpts& opts = app.got_subcommand(run_cmd)    ? run_opts
                                 : app.got_subcommand(swap_cmd) ? swap_opts
                                 : app.got_subcommand(init_cmd) ? init_opts
                                                                : imu_opts;
        const cli::LoadedConfig cfg = resolve_config(opts);
        echo_config(log, cfg);
        if (app.got_subcommand(run_cmd)) {
            return cmd_run_slam(log, cfg, opts.out_dir);
        }
        if (app.got_subcommand(swap_cmd)) {
            return cmd_sweep(log, cfg, opts.out_dir, bench::CorruptionSpec::Kind::kSwap,
                             "sweep-swap", cfg.swap_levels);
        }
        if (app.got_subcommand(init_cmd)) {
            return cmd_sweep(log, cfg, opts.out_dir,
                             bench::CorruptionSpec::Kind::kInitNoise, "sweep-init-noise",
                             cfg.init_noise_levels);
        }
        return cmd_imu_check(log, cfg, opts.out_dir);
    } catch (const cli::ConfigError& e) {
        log.error(e.what());
        return kExitConfig;
    } catch (const imu::ImuCsvError& e) {
        log.error(e.what());
        return kExitConfig;
    } catch (const bench::IoError& e) {
        log.error(e.what());
        return kExitIo;
    } catch (const adfslam::FilterError& e) {
        log.error(e.what());
        return kExitConfig;
    }
}
