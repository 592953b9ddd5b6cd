#pragma once

// Run configuration: a flat `key = value` text file.
//
//   # comment
//   scenario = quadcopter
//   scenario.epsilon = 0.002
//   system.A = 0, 1; -2, -3      # rows split by ';', entries by ',' or space
//   scenario.observer_poles = -1, -2
//
// Unknown keys, duplicate keys and malformed values are rejected with the
// offending line and key. See README.md for the full key list.

#include <filesystem>
#include <string>

#include "hso/control_synthesis.hpp"
#include "hso/errors.hpp"
#include "hso/scenarios.hpp"

namespace hso::harness {

class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : Error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  /// 1-based, or 0 when the error is not tied to a line.
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Environment variable consulted for the default output directory.
inline constexpr const char* kOutputDirEnv = "HSO_IRL_OUTPUT_DIR";

struct RunConfig {
  std::string scenario_kind = "academic";
  Scenario scenario;
  double horizon = 50.0;  // s
  double step = 1e-3;     // s
  double log_period = 0.08;
  std::filesystem::path output_dir;
  bool emit_svg = false;
  CareOptions care;
  /// Equivalence tolerance as a fraction of ||K_EP||_F.
  double equivalence_rel_tol = 0.05;
  double hjb_tol = 1e-3;
  double fi_tol = 1e-6;
  double rank_tol = 1e-8;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace hso::harness
