#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adfslam/bench/corruption.hpp"
#include "adfslam/bench/metrics.hpp"
#include "adfslam/bench/rng.hpp"
#include "adfslam/bench/scenario.hpp"
#include "adfslam/core/ekf.hpp"
#include "adfslam/core/ukf.hpp"
#include "adfslam/slam2d/models.hpp"
#include "adfslam/slam2d/state.hpp"

namespace adfslam::bench {

enum class FilterMode { kEkf, kUkf };

inline const char* to_string(FilterMode mode) {
    return mode == FilterMode::kEkf ? "ekf" : "ukf";
}

struct RunResult {
    FilterMode mode = FilterMode::kEkf;
    bool diverged = false;
    int steps_completed = 0;
    double path_rmse = std::numeric_limits<double>::quiet_NaN();
    double map_rmse = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;
    std::vector<Eigen::Vector3d> est_path;       // pose after each step, incl. start
    std::vector<double> cov_traces;              // one per est_path entry
    std::vector<Eigen::Vector2d> est_landmarks;  // final map (empty if diverged)
    std::vector<Eigen::Vector2d> init_guesses;   // applied initial map (audit)
    long swap_opportunities = 0;                 // applied swap realization (audit)
    long swaps_applied = 0;
};

/// Full filter pass over one scenario: anchored pose prior, linear odometry
/// prediction (exact for Eq. 18-style dynamics, shared by both modes), then a
/// mode-specific update with the stacked visible projections. Divergence is
/// recorded in the result, never thrown.
inline RunResult run_slam(const Scenario& scenario, const CorruptionSpec& corruption,
                          FilterMode mode) {
    validate_corruption_spec(corruption);
    const ScenarioConfig& cfg = scenario.config;
    const slam2d::Slam2dLayout layout{cfg.n_landmarks};

    RunResult result;
    result.mode = mode;

    // Corruption draws use dedicated streams: identical for both filter modes
    // and unaffected by the scenario noise realization.
    std::mt19937_64 init_rng = derive_rng(cfg.seed, RngStream::kInitNoise);
    std::mt19937_64 swap_rng = derive_rng(cfg.seed, RngStream::kSwap);

    result.init_guesses =
        corruption.kind == CorruptionSpec::Kind::kInitNoise
            ? corrupt_init(scenario.gt_landmarks, corruption.init_noise_var, init_rng)
            : scenario.gt_landmarks;

    const std::vector<StepMeasurements>* steps = &scenario.measurements;
    SwapOutcome swapped;
    if (corruption.kind == CorruptionSpec::Kind::kSwap) {
        swapped = corrupt_swaps(scenario.measurements, scenario.gt_landmarks,
                                corruption.swap_fraction, swap_rng);
        result.swap_opportunities = swapped.opportunities;
        result.swaps_applied = swapped.swaps;
        steps = &swapped.measurements;
    }

    GaussianState state =
        slam2d::make_slam_prior(scenario.gt_path.front(), cfg.pose_prior_var,
                                result.init_guesses, cfg.landmark_prior_std);
    const Eigen::Matrix3d q_pose =
        Eigen::Vector3d(cfg.odom_pos_std * cfg.odom_pos_std,
                        cfg.odom_pos_std * cfg.odom_pos_std,
                        cfg.odom_theta_std * cfg.odom_theta_std)
            .asDiagonal();

    result.est_path.emplace_back(state.mean.head<3>());
    result.cov_traces.push_back(state.cov.trace());

    const auto started = std::chrono::steady_clock::now();
    for (int k = 0; k < cfg.n_steps; ++k) {
        try {
            const auto dyn =
                slam2d::slam_dynamics_model(layout, scenario.controls[static_cast<std::size_t>(k)], q_pose);
            state = ekf_predict(state, dyn, k);
            const StepMeasurements& step = (*steps)[static_cast<std::size_t>(k)];
            if (!step.ids.empty()) {
                const auto model = slam2d::stacked_measurement_model(
                    layout, step.ids, cfg.intrinsics, cfg.meas_std);
                state = (mode == FilterMode::kEkf
                             ? ekf_update(state, model, step.noisy, k)
                             : ukf_update(state, model, step.noisy, k))
                            .first;
            }
            if (!state.is_finite()) {
                throw NumericError("state left the finite domain");
            }
        } catch (const FilterError&) {
            result.diverged = true;
            break;
        }
        result.steps_completed = k + 1;
        result.est_path.emplace_back(state.mean.head<3>());
        result.cov_traces.push_back(state.cov.trace());
    }
    result.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();

    if (!result.diverged) {
        for (int i = 0; i < cfg.n_landmarks; ++i) {
            result.est_landmarks.push_back(layout.landmark(state.mean, i));
        }
        try {
            const SimilarityTransform t =
                procrustes_align(result.est_landmarks, scenario.gt_landmarks);
            std::vector<Eigen::Vector2d> aligned_map;
            aligned_map.reserve(result.est_landmarks.size());
            for (const auto& p : result.est_landmarks) {
                aligned_map.push_back(t.apply(p));
            }
            result.map_rmse = rmse_normalized(aligned_map, scenario.gt_landmarks,
                                              scenario.scene_diameter);

            // the map-derived transform also gauges the path
            std::vector<Eigen::Vector2d> aligned_path;
            std::vector<Eigen::Vector2d> gt_positions;
            for (std::size_t i = 0; i < result.est_path.size(); ++i) {
                aligned_path.push_back(t.apply(result.est_path[i].head<2>()));
                gt_positions.emplace_back(scenario.gt_path[i].head<2>());
            }
            result.path_rmse =
                rmse_normalized(aligned_path, gt_positions, scenario.scene_diameter);
        } catch (const FilterError&) {
            result.diverged = true;
            result.path_rmse = std::numeric_limits<double>::quiet_NaN();
            result.map_rmse = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return result;
}

struct SweepRow {
    std::string experiment;
    FilterMode mode = FilterMode::kEkf;
    double level = 0.0;
    std::uint64_t seed = 0;
    int n_steps = 0;
    int n_landmarks = 0;
    RunResult result;
};

struct AggregateRow {
    std::string experiment;
    FilterMode mode = FilterMode::kEkf;
    double level = 0.0;
    int n_runs = 0;
    int n_diverged = 0;
    double path_rmse_mean = std::numeric_limits<double>::quiet_NaN();
    double path_rmse_std = std::numeric_limits<double>::quiet_NaN();
    double map_rmse_mean = std::numeric_limits<double>::quiet_NaN();
    double map_rmse_std = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<AggregateRow> aggregates;
};

struct SweepPlan {
    std::string experiment;
    ScenarioConfig base_config;
    CorruptionSpec::Kind kind = CorruptionSpec::Kind::kNone;
    std::vector<double> levels{0.0};
    std::vector<std::uint64_t> seeds{1};
    std::vector<FilterMode> modes{FilterMode::kEkf, FilterMode::kUkf};
    int parallelism = 1;
};

namespace detail {

inline CorruptionSpec spec_at_level(CorruptionSpec::Kind kind, double level) {
    CorruptionSpec spec;
    spec.kind = kind;
    if (kind == CorruptionSpec::Kind::kSwap) {
        spec.swap_fraction = level;
    } else if (kind == CorruptionSpec::Kind::kInitNoise) {
        spec.init_noise_var = level;
    }
    return spec;
}

inline void fill_aggregates(SweepResult& out, const SweepPlan& plan) {
    for (const double level : plan.levels) {
        for (const FilterMode mode : plan.modes) {
            AggregateRow agg;
            agg.experiment = plan.experiment;
            agg.mode = mode;
            agg.level = level;
            std::vector<double> paths;
            std::vector<double> maps;
            for (const SweepRow& row : out.rows) {
                if (row.level != level || row.mode != mode) {
                    continue;
                }
                ++agg.n_runs;
                if (row.result.diverged) {
                    ++agg.n_diverged;
                } else {
                    paths.push_back(row.result.path_rmse);
                    maps.push_back(row.result.map_rmse);
                }
            }
            const auto stats = [](const std::vector<double>& v) {
                if (v.empty()) {
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    return std::make_pair(nan, nan);
                }
                double mean = 0.0;
                for (double x : v) {
                    mean += x;
                }
                mean /= static_cast<double>(v.size());
                double var = 0.0;
                if (v.size() > 1) {
                    for (double x : v) {
                        var += (x - mean) * (x - mean);
                    }
                    var /= static_cast<double>(v.size() - 1);
                }
                return std::make_pair(mean, std::sqrt(var));
            };
            std::tie(agg.path_rmse_mean, agg.path_rmse_std) = stats(paths);
            std::tie(agg.map_rmse_mean, agg.map_rmse_std) = stats(maps);
            out.aggregates.push_back(std::move(agg));
        }
    }
}

}  // namespace detail

/// Cartesian product of (level x seed x mode), each run independent and fully
/// derived from its seed. Row order and content are identical for any worker
/// count; failures are recorded as diverged rows.
inline SweepResult sweep(const SweepPlan& plan) {
    validate_scenario_config(plan.base_config);
    if (plan.levels.empty() || plan.seeds.empty() || plan.modes.empty()) {
        throw InvalidScenarioError("sweep needs nonempty levels, seeds, and modes");
    }

    struct Task {
        double level;
        std::uint64_t seed;
        FilterMode mode;
    };
    std::vector<Task> tasks;
    for (const double level : plan.levels) {
        for (const std::uint64_t seed : plan.seeds) {
            for (const FilterMode mode : plan.modes) {
                tasks.push_back({level, seed, mode});
            }
        }
    }

    SweepResult out;
    out.rows.resize(tasks.size());
    const auto execute = [&](std::size_t idx) {
        const Task& task = tasks[idx];
        SweepRow row;
        row.experiment = plan.experiment;
        row.mode = task.mode;
        row.level = task.level;
        row.seed = task.seed;
        row.n_steps = plan.base_config.n_steps;
        row.n_landmarks = plan.base_config.n_landmarks;
        try {
            ScenarioConfig cfg = plan.base_config;
            cfg.seed = task.seed;
            const Scenario scenario = generate_scenario(cfg);
            row.result =
                run_slam(scenario, detail::spec_at_level(plan.kind, task.level), task.mode);
        } catch (const std::exception&) {
            row.result.mode = task.mode;
            row.result.diverged = true;
        }
        out.rows[idx] = std::move(row);
    };

    const int workers =
        std::max(1, std::min<int>(plan.parallelism, static_cast<int>(tasks.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            execute(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tasks.size();
                     i = next.fetch_add(1)) {
                    execute(i);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    detail::fill_aggregates(out, plan);
    return out;
}

}  // namespace adfslam::bench
