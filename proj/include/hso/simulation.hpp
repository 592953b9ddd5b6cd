#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hso/control_synthesis.hpp"
#include "hso/history_stack.hpp"
#include "hso/observer.hpp"
#include "hso/scenarios.hpp"

namespace hso {

/// Snapshot handed to hooks after the data/swap logic of a step has run and
/// before the state is integrated to the next step.
struct StepRecord {
  long step = 0;
  double t = 0.0;
  const VectorXd* x = nullptr;
  const VectorXd* x_hat = nullptr;
  /// Input recorded as the demonstration.
  const VectorXd* u = nullptr;
  /// Input applied to the plant (expert command plus excitation).
  const VectorXd* u_applied = nullptr;
  const VectorXd* w = nullptr;
  /// Delta for the active stack; empty before the first swap.
  const VectorXd* delta = nullptr;
  const HistoryStack* h1 = nullptr;
  const HistoryStack* h2 = nullptr;
  const WeightUpdateLaw* law = nullptr;
  /// Informativity of the active stack, evaluated when it was installed.
  const InformativityReport* h1_informativity = nullptr;
  bool sampled = false;
  bool swapped = false;
  int swap_count = 0;
};

struct SimulationHooks {
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const StepRecord&)> on_swap;
};

struct SimulationOptions {
  double horizon = 50.0;
  double step = 1e-3;
  CareOptions care;
  /// Evaluate informativity of H2 after every sample and of each newly
  /// installed H1; needed only for the first-FI time.
  bool track_informativity = false;
  double fi_tol = 1e-6;
  double rank_tol = kDefaultRankTol;
};

struct SimulationResult {
  ExpertPolicy expert;
  MatrixXd K3;
  ObserverState final_state;
  VectorXd final_x;
  HistoryStack h1;
  HistoryStack h2;
  SwapSchedule schedule;
  std::vector<double> swap_times;
  /// ||Delta|| immediately after the first swap.
  std::optional<double> delta_at_first_swap;
  std::optional<double> first_fi_time;
  std::optional<InformativityReport> last_h1_informativity;
  long steps = 0;
};

/// Co-simulates the expert-controlled plant, the observer, stack recording
/// and the swap schedule on one RK4 clock. The plant receives
/// u = K_EP x + d(t). Samples are offered to H2 every data_period.
SimulationResult simulate_expert(const Scenario& scn,
                                 const SimulationOptions& options,
                                 const SimulationHooks& hooks = {});

}  // namespace hso
