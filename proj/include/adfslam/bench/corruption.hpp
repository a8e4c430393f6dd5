#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "adfslam/bench/scenario.hpp"
#include "adfslam/core/errors.hpp"

namespace adfslam::bench {

struct CorruptionSpec {
    enum class Kind { kNone, kSwap, kInitNoise };
    Kind kind = Kind::kNone;
    double swap_fraction = 0.0;   // rho in [0, 1]
    double init_noise_var = 0.0;  // sigma^2 in m^2
};

inline void validate_corruption_spec(const CorruptionSpec& spec) {
    if (spec.swap_fraction < 0.0 || spec.swap_fraction > 1.0) {
        throw InvalidScenarioError("swap fraction must lie in [0, 1]");
    }
    if (spec.init_noise_var < 0.0) {
        throw InvalidScenarioError("init noise variance must be nonnegative");
    }
}

struct SwapOutcome {
    std::vector<StepMeasurements> measurements;
    long opportunities = 0;  // Bernoulli draws taken (a partner existed)
    long swaps = 0;          // transpositions applied
};

/// Per step, each not-yet-swapped visible landmark is, with probability rho,
/// transposed with its nearest (ground-truth distance) not-yet-swapped
/// visible neighbor. Each measurement joins at most one swap per step.
inline SwapOutcome corrupt_swaps(const std::vector<StepMeasurements>& steps,
                                 const std::vector<Eigen::Vector2d>& gt_landmarks,
                                 double rho, std::mt19937_64& rng) {
    if (rho < 0.0 || rho > 1.0) {
        throw InvalidScenarioError("swap fraction must lie in [0, 1]");
    }
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    SwapOutcome out;
    out.measurements = steps;
    for (auto& step : out.measurements) {
        const std::size_t m = step.ids.size();
        std::vector<bool> used(m, false);
        for (std::size_t j = 0; j < m; ++j) {
            if (used[j]) {
                continue;
            }
            std::size_t partner = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < m; ++l) {
                if (l == j || used[l]) {
                    continue;
                }
                const double dist =
                    (gt_landmarks[step.ids[j]] - gt_landmarks[step.ids[l]]).norm();
                if (dist < best) {
                    best = dist;
                    partner = l;
                }
            }
            if (partner == m) {
                continue;  // nobody left to swap with
            }
            ++out.opportunities;
            if (uniform(rng) < rho) {
                std::swap(step.noisy[static_cast<Eigen::Index>(j)],
                          step.noisy[static_cast<Eigen::Index>(partner)]);
                used[j] = true;
                used[partner] = true;
                ++out.swaps;
            }
        }
    }
    return out;
}

/// Initial landmark guesses: ground truth plus isotropic Gaussian noise. The
/// prior covariance is unaffected by the corruption scale.
inline std::vector<Eigen::Vector2d> corrupt_init(
    const std::vector<Eigen::Vector2d>& gt_landmarks, double variance,
    std::mt19937_64& rng) {
    if (variance < 0.0) {
        throw InvalidScenarioError("init noise variance must be nonnegative");
    }
    const double sigma = std::sqrt(variance);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::Vector2d> guesses;
    guesses.reserve(gt_landmarks.size());
    for (const auto& lm : gt_landmarks) {
        guesses.emplace_back(lm[0] + sigma * gauss(rng), lm[1] + sigma * gauss(rng));
    }
    return guesses;
}

}  // namespace adfslam::bench
