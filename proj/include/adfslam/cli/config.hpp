#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "adfslam/bench/corruption.hpp"
#include "adfslam/bench/scenario.hpp"
#include "adfslam/core/errors.hpp"

namespace adfslam::cli {

class ConfigError : public FilterError {
public:
    using FilterError::FilterError;
};

/// Everything a command needs, resolved from defaults, the JSON file, and
/// --set overrides (in that precedence order).
struct LoadedConfig {
    bench::ScenarioConfig scenario;
    bench::CorruptionSpec corruption;  // single-run corruption (run-slam)
    std::string filter = "both";       // run-slam: ekf | ukf | both
    std::vector<std::uint64_t> seeds;
    std::vector<double> swap_levels;
    std::vector<double> init_noise_levels{0.0, 0.25, 1.0, 4.0, 9.0, 16.0};
    int parallelism = 0;  // 0 means all hardware threads
    bool dump_trajectories = false;
    std::string imu_csv;
    double imu_accel_noise_psd = 1e-3;
    double imu_gyro_noise_psd = 1e-4;

    // key -> "value (default|file|override)", one entry per known key
    std::vector<std::pair<std::string, std::string>> effective;
};

namespace detail {

using Json = nlohmann::json;

inline LoadedConfig make_defaults() {
    LoadedConfig cfg;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        cfg.seeds.push_back(s);
    }
    for (int i = 0; i <= 15; ++i) {
        cfg.swap_levels.push_back(0.01 * i);
    }
    return cfg;
}

[[noreturn]] inline void fail(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
}

inline double as_number(const std::string& key, const Json& v) {
    if (!v.is_number()) {
        fail(key, "expected a number, got " + std::string(v.type_name()));
    }
    return v.get<double>();
}

inline double as_positive(const std::string& key, const Json& v) {
    const double x = as_number(key, v);
    if (!(x > 0.0)) {
        fail(key, "must be positive");
    }
    return x;
}

inline double as_nonnegative(const std::string& key, const Json& v) {
    const double x = as_number(key, v);
    if (!(x >= 0.0)) {
        fail(key, "must be nonnegative");
    }
    return x;
}

inline int as_count(const std::string& key, const Json& v, int min_value) {
    if (!v.is_number_integer()) {
        fail(key, "expected an integer");
    }
    const auto x = v.get<long long>();
    if (x < min_value) {
        fail(key, "must be at least " + std::to_string(min_value));
    }
    return static_cast<int>(x);
}

inline bool as_bool(const std::string& key, const Json& v) {
    if (!v.is_boolean()) {
        fail(key, "expected true or false");
    }
    return v.get<bool>();
}

inline std::string as_string(const std::string& key, const Json& v) {
    if (!v.is_string()) {
        fail(key, "expected a string");
    }
    return v.get<std::string>();
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, sep)) {
        parts.push_back(part);
    }
    return parts;
}

/// Seeds accept an integer count N (meaning 1..N), an explicit array,
/// a "lo..hi" range string, or a comma list.
inline std::vector<std::uint64_t> parse_seeds(const std::string& key, const Json& v) {
    std::vector<std::uint64_t> seeds;
    const auto push = [&](long long s) {
        if (s < 0) {
            fail(key, "seeds must be nonnegative");
        }
        seeds.push_back(static_cast<std::uint64_t>(s));
    };
    if (v.is_number_integer()) {
        const auto n = v.get<long long>();
        if (n < 1) {
            fail(key, "seed count must be at least 1");
        }
        for (long long s = 1; s <= n; ++s) {
            push(s);
        }
    } else if (v.is_array()) {
        for (const auto& item : v) {
            if (!item.is_number_integer()) {
                fail(key, "array entries must be integers");
            }
            push(item.get<long long>());
        }
    } else if (v.is_string()) {
        const std::string text = v.get<std::string>();
        const auto dots = text.find("..");
        try {
            if (dots != std::string::npos) {
                const long long lo = std::stoll(text.substr(0, dots));
                const long long hi = std::stoll(text.substr(dots + 2));
                if (hi < lo) {
                    fail(key, "range is empty");
                }
                for (long long s = lo; s <= hi; ++s) {
                    push(s);
                }
            } else {
                for (const auto& part : split(text, ',')) {
                    push(std::stoll(part));
                }
            }
        } catch (const std::invalid_argument&) {
            fail(key, "cannot parse '" + text + "'");
        } catch (const std::out_of_range&) {
            fail(key, "value out of range in '" + text + "'");
        }
    } else {
        fail(key, "expected a count, an array, or a range string");
    }
    if (seeds.empty()) {
        fail(key, "must name at least one seed");
    }
    return seeds;
}

inline std::vector<double> parse_levels(const std::string& key, const Json& v, double lo,
                                        double hi) {
    std::vector<double> levels;
    const auto push = [&](double x) {
        if (!(x >= lo && x <= hi)) {
            std::ostringstream msg;
            msg << "level " << x << " outside [" << lo << ", " << hi << "]";
            fail(key, msg.str());
        }
        levels.push_back(x);
    };
    if (v.is_array()) {
        for (const auto& item : v) {
            push(as_number(key, item));
        }
    } else if (v.is_number()) {
        push(v.get<double>());
    } else if (v.is_string()) {
        try {
            for (const auto& part : split(v.get<std::string>(), ',')) {
                push(std::stod(part));
            }
        } catch (const std::invalid_argument&) {
            fail(key, "cannot parse '" + v.get<std::string>() + "'");
        }
    } else {
        fail(key, "expected an array, a number, or a comma list");
    }
    if (levels.empty()) {
        fail(key, "must name at least one level");
    }
    return levels;
}

template <typename T>
std::string render_list(const std::vector<T>& values) {
    Json arr = Json::array();
    for (const auto& v : values) {
        arr.push_back(v);
    }
    return arr.dump();
}

struct KeyBinding {
    std::function<void(LoadedConfig&, const Json&)> set;
    std::function<std::string(const LoadedConfig&)> get;
};

inline const std::map<std::string, KeyBinding>& key_table() {
    static const std::map<std::string, KeyBinding> table = [] {
        std::map<std::string, KeyBinding> t;
        const auto number_key = [&t](const std::string& key, auto member,
                                     double (*check)(const std::string&, const Json&)) {
            t[key] = KeyBinding{
                [key, member, check](LoadedConfig& c, const Json& v) {
                    c.*member = check(key, v);
                },
                [member](const LoadedConfig& c) { return Json(c.*member).dump(); }};
        };
        const auto scenario_key = [&t](const std::string& key, auto member,
                                       double (*check)(const std::string&, const Json&)) {
            t[key] = KeyBinding{
                [key, member, check](LoadedConfig& c, const Json& v) {
                    c.scenario.*member = check(key, v);
                },
                [member](const LoadedConfig& c) { return Json(c.scenario.*member).dump(); }};
        };
        const auto camera_key = [&t](const std::string& key, auto member) {
            t[key] = KeyBinding{
                [key, member](LoadedConfig& c, const Json& v) {
                    c.scenario.intrinsics.*member = as_positive(key, v);
                },
                [member](const LoadedConfig& c) {
                    return Json(c.scenario.intrinsics.*member).dump();
                }};
        };
        const auto int_key = [&t](const std::string& key, auto member, int min_value) {
            t[key] = KeyBinding{
                [key, member, min_value](LoadedConfig& c, const Json& v) {
                    c.scenario.*member = as_count(key, v, min_value);
                },
                [member](const LoadedConfig& c) { return Json(c.scenario.*member).dump(); }};
        };

        int_key("n_steps", &bench::ScenarioConfig::n_steps, 1);
        int_key("n_landmarks", &bench::ScenarioConfig::n_landmarks, 1);
        int_key("n_loops", &bench::ScenarioConfig::n_loops, 1);
        scenario_key("path_radius", &bench::ScenarioConfig::path_radius, as_positive);
        scenario_key("landmark_ring_radius", &bench::ScenarioConfig::landmark_ring_radius,
                     as_positive);
        scenario_key("odom_pos_std", &bench::ScenarioConfig::odom_pos_std, as_nonnegative);
        scenario_key("odom_theta_std", &bench::ScenarioConfig::odom_theta_std,
                     as_nonnegative);
        scenario_key("meas_std", &bench::ScenarioConfig::meas_std, as_nonnegative);
        scenario_key("landmark_prior_std", &bench::ScenarioConfig::landmark_prior_std,
                     as_positive);

        t["seed"] = KeyBinding{[](LoadedConfig& c, const Json& v) {
                                   if (!v.is_number_integer() || v.get<long long>() < 0) {
                                       fail("seed", "expected a nonnegative integer");
                                   }
                                   c.scenario.seed = v.get<std::uint64_t>();
                               },
                               [](const LoadedConfig& c) {
                                   return Json(c.scenario.seed).dump();
                               }};

        t["pose_prior_var"] = KeyBinding{
            [](LoadedConfig& c, const Json& v) {
                if (!v.is_array() || v.size() != 3) {
                    fail("pose_prior_var", "expected an array of 3 variances");
                }
                for (int i = 0; i < 3; ++i) {
                    c.scenario.pose_prior_var[i] = as_positive("pose_prior_var", v[i]);
                }
            },
            [](const LoadedConfig& c) {
                return Json({c.scenario.pose_prior_var[0], c.scenario.pose_prior_var[1],
                             c.scenario.pose_prior_var[2]})
                    .dump();
            }};

        camera_key("focal", &slam2d::CameraIntrinsics2d::focal);
        t["principal"] = KeyBinding{[](LoadedConfig& c, const Json& v) {
                                        c.scenario.intrinsics.principal =
                                            as_number("principal", v);
                                    },
                                    [](const LoadedConfig& c) {
                                        return Json(c.scenario.intrinsics.principal).dump();
                                    }};
        camera_key("image_halfwidth", &slam2d::CameraIntrinsics2d::image_halfwidth);
        camera_key("depth_epsilon", &slam2d::CameraIntrinsics2d::depth_epsilon);
        camera_key("saturation_halfwidth",
                   &slam2d::CameraIntrinsics2d::saturation_halfwidth);

        t["rho"] = KeyBinding{[](LoadedConfig& c, const Json& v) {
                                  const double x = as_number("rho", v);
                                  if (x < 0.0 || x > 1.0) {
                                      fail("rho", "must lie in [0, 1]");
                                  }
                                  c.corruption.swap_fraction = x;
                              },
                              [](const LoadedConfig& c) {
                                  return Json(c.corruption.swap_fraction).dump();
                              }};
        t["init_noise_var"] = KeyBinding{
            [](LoadedConfig& c, const Json& v) {
                c.corruption.init_noise_var = as_nonnegative("init_noise_var", v);
            },
            [](const LoadedConfig& c) { return Json(c.corruption.init_noise_var).dump(); }};

        t["filter"] = KeyBinding{[](LoadedConfig& c, const Json& v) {
                                     const std::string f = as_string("filter", v);
                                     if (f != "ekf" && f != "ukf" && f != "both") {
                                         fail("filter", "expected ekf, ukf, or both");
                                     }
                                     c.filter = f;
                                 },
                                 [](const LoadedConfig& c) { return c.filter; }};

        t["seeds"] = KeyBinding{[](LoadedConfig& c, const Json& v) {
                                    c.seeds = parse_seeds("seeds", v);
                                },
                                [](const LoadedConfig& c) { return render_list(c.seeds); }};
        t["swap_levels"] = KeyBinding{
            [](LoadedConfig& c, const Json& v) {
                c.swap_levels = parse_levels("swap_levels", v, 0.0, 1.0);
            },
            [](const LoadedConfig& c) { return render_list(c.swap_levels); }};
        t["init_noise_levels"] = KeyBinding{
            [](LoadedConfig& c, const Json& v) {
                c.init_noise_levels =
                    parse_levels("init_noise_levels", v, 0.0, 1e12);
            },
            [](const LoadedConfig& c) { return render_list(c.init_noise_levels); }};

        t["parallelism"] = KeyBinding{
            [](LoadedConfig& c, const Json& v) {
                if (!v.is_number_integer() || v.get<long long>() < 0) {
                    fail("parallelism", "expected a nonnegative integer (0 = all cores)");
                }
                c.parallelism = static_cast<int>(v.get<long long>());
            },
            [](const LoadedConfig& c) { return Json(c.parallelism).dump(); }};
        t["dump_trajectories"] = KeyBinding{
            [](LoadedConfig& c, const Json& v) {
                c.dump_trajectories = as_bool("dump_trajectories", v);
            },
            [](const LoadedConfig& c) { return Json(c.dump_trajectories).dump(); }};

        t["imu_csv"] = KeyBinding{[](LoadedConfig& c, const Json& v) {
                                      c.imu_csv = as_string("imu_csv", v);
                                  },
                                  [](const LoadedConfig& c) { return c.imu_csv; }};
        number_key("imu_accel_noise_psd", &LoadedConfig::imu_accel_noise_psd, as_positive);
        number_key("imu_gyro_noise_psd", &LoadedConfig::imu_gyro_noise_psd, as_positive);
        return t;
    }();
    return table;
}

inline void apply_key(LoadedConfig& cfg, std::map<std::string, const char*>& sources,
                      const std::string& key, const Json& value, const char* source) {
    const auto& table = key_table();
    const auto it = table.find(key);
    if (it == table.end()) {
        fail(key, "unknown config key");
    }
    it->second.set(cfg, value);
    sources[key] = source;
}

/// An override value is JSON when it parses as JSON, otherwise a bare string
/// (so filter=ekf and seeds=1,2,3 work without quoting).
inline Json override_value(const std::string& text) {
    const Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
        return Json(text);
    }
    return parsed;
}

}  // namespace detail

/// Resolve a config: built-in defaults, then the JSON file (optional), then
/// key=value overrides. Throws ConfigError with the offending field. The
/// `effective` list names every known key with its final value and source.
inline LoadedConfig load_config(const std::string& config_path,
                                const std::vector<std::string>& overrides) {
    using detail::Json;
    LoadedConfig cfg = detail::make_defaults();
    std::map<std::string, const char*> sources;

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            throw ConfigError("config: cannot open '" + config_path + "'");
        }
        Json doc;
        try {
            doc = Json::parse(in, nullptr, true, true);
        } catch (const Json::parse_error& e) {
            throw ConfigError("config: " + std::string(e.what()));
        }
        if (!doc.is_object()) {
            throw ConfigError("config: top level must be a JSON object");
        }
        for (const auto& [key, value] : doc.items()) {
            detail::apply_key(cfg, sources, key, value, "file");
        }
    }

    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override '" + item + "' is not of the form key=value");
        }
        const std::string key = item.substr(0, eq);
        detail::apply_key(cfg, sources, key, detail::override_value(item.substr(eq + 1)),
                          "override");
    }

    if (cfg.corruption.swap_fraction > 0.0 && cfg.corruption.init_noise_var > 0.0) {
        throw ConfigError("rho/init_noise_var: choose at most one corruption per run");
    }
    cfg.corruption.kind = cfg.corruption.swap_fraction > 0.0
                              ? bench::CorruptionSpec::Kind::kSwap
                          : cfg.corruption.init_noise_var > 0.0
                              ? bench::CorruptionSpec::Kind::kInitNoise
                              : bench::CorruptionSpec::Kind::kNone;

    if (cfg.scenario.intrinsics.saturation_halfwidth <=
        cfg.scenario.intrinsics.image_halfwidth) {
        throw ConfigError("saturation_halfwidth: must exceed image_halfwidth");
    }
    try {
        bench::validate_scenario_config(cfg.scenario);
    } catch (const FilterError& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }

    for (const auto& [key, binding] : detail::key_table()) {
        const auto it = sources.find(key);
        const char* source = it == sources.end() ? "default" : it->second;
        cfg.effective.emplace_back(key, binding.get(cfg) + " (" + source + ")");
    }
    return cfg;
}

}  // namespace adfslam::cli
