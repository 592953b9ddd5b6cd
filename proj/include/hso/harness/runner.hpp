#pragma once

#include <iosfwd>
#include <optional>

#include "hso/harness/config.hpp"
#include "hso/observer.hpp"
#include "hso/simulation.hpp"

namespace hso::harness {

struct RunSummary {
  std::string scenario;
  double horizon = 0.0;
  /// NaN when no stack was ever installed.
  double final_delta_norm = 0.0;
  /// ||K_hat - K_EP||_F at the final time; NaN when R-hat is singular.
  double final_gain_error = 0.0;
  double expert_gain_norm = 0.0;
  bool equivalent = false;
  std::optional<EquivalenceReport> certification;
  double wall_clock_s = 0.0;
  int swap_count = 0;
  bool fi_ok_at_end = false;
  std::optional<double> first_fi_time;

  /// One line, `key=value` pairs separated by spaces.
  std::string line() const;
};

/// Simulates the configured scenario and writes timeseries.csv,
/// final_solution.csv, stack_h1.csv and optionally SVG plots into
/// config.output_dir. CSV rows written before an error are flushed.
RunSummary run(const RunConfig& config);

struct InformativitySummary {
  std::optional<double> first_fi_time;
  /// Report for the active stack at the end, if one was installed.
  std::optional<InformativityReport> active;
  /// Report for the filling stack at the end.
  InformativityReport filling;
  Eigen::Index filling_size = 0;
};

InformativitySummary check_informativity(const RunConfig& config);
void print_informativity(std::ostream& os, const InformativitySummary& s);

/// Expert policy for the configured system and cost.
ExpertPolicy synth_lqr(const RunConfig& config);
void print_expert(std::ostream& os, const ExpertPolicy& p);

/// Column names of timeseries.csv for an n-state, m-input system.
std::vector<std::string> timeseries_header(Eigen::Index n, Eigen::Index m);

}  // namespace hso::harness
