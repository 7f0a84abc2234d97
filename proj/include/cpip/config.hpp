#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "cpip/types.hpp"

namespace cpip {

struct RunOptions {
  int k_folds = 5;
  int bootstrap_draws = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  double prop_floor = 1e-4;
  double positivity_threshold = 100.0;
  int threads = 0;  // 0: use available parallelism
};

struct PolicyConfig {
  TiltConfig tilt;
  RunOptions options;
};

// JSON document:
//   { "actions": ["a1","a2","a3"],            (optional; defaults a1..aK)
//     "nu": [0.4, 0.4, 0.2],
//     "cost": [2, 1, 1]  or  [[..],[..],[..]],
//     "delta": 1.0 | [..] | {"min": -2, "max": 2, "points": 100},
//     "options": { "k_folds", "bootstrap", "alpha", "seed",
//                  "prop_floor", "positivity_threshold" } }
// Throws ConfigError naming the offending field.
PolicyConfig parse_policy_config(const nlohmann::json& doc);
PolicyConfig parse_policy_config_text(const std::string& text);
PolicyConfig load_policy_config(const std::string& path);

nlohmann::json policy_config_to_json(const PolicyConfig& cfg);

// FNV-1a over the canonical serialized config; stamped into output headers.
std::uint64_t fnv1a64(const std::string& s);
std::string config_hash(const PolicyConfig& cfg);

}  // namespace cpip
