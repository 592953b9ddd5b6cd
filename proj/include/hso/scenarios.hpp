#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "hso/control_synthesis.hpp"
#include "hso/history_stack.hpp"

namespace hso {

/// Which input the learner sees as the expert's demonstration.
enum class RecordedInput {
  /// The expert's own command K_EP x; the probing signal reaches the plant
  /// through B but is not part of the demonstration.
  kExpertCommand,
  /// The total applied input K_EP x + d.
  kAppliedInput,
};

/// Sum-of-sinusoids probing signal. For each target channel, in listed
/// order, `count` (frequency, phase) pairs are drawn uniformly from the
/// ranges with SplitMix64 seeded by `seed`: frequency first, then phase.
struct ExcitationSpec {
  int count = 0;
  double amplitude = 0.0;
  double freq_lo_hz = 0.0;
  double freq_hi_hz = 0.0;
  double phase_lo = 0.0;
  double phase_hi = 0.0;
  std::uint64_t seed = 1;
  /// Empty means every input channel.
  std::vector<int> target_channels;
  RecordedInput recorded_input = RecordedInput::kExpertCommand;
};

/// Excitation with its random draws fixed at construction.
class Excitation {
 public:
  Excitation() = default;
  Excitation(const ExcitationSpec& spec, Eigen::Index inputs);

  VectorXd operator()(double t) const;
  Eigen::Index inputs() const { return inputs_; }

  struct Tone {
    int channel;
    double freq_hz;
    double phase;
  };
  const std::vector<Tone>& tones() const { return tones_; }

 private:
  Eigen::Index inputs_ = 0;
  double amplitude_ = 0.0;
  std::vector<Tone> tones_;
};

/// Convenience wrapper; builds the draws on every call.
VectorXd excitation_signal(const ExcitationSpec& spec, Eigen::Index inputs,
                           double t);

struct CostPair {
  MatrixXd Q;
  MatrixXd R;
};

struct Schedule {
  double data_period = 0.08;
  double purge_period = 2.0;
  double cond_threshold = 1e8;
  double epsilon = 1e-2;
  double r1 = 1.0;
  double k4 = 50.0;
  Eigen::Index stack_size = 0;
  PurgePolicy purge_policy = PurgePolicy::kAnd;
  std::vector<double> observer_poles;
};

struct Scenario {
  std::string name;
  LtiSystem sys;
  CostPair expert_cost;
  VectorXd x0;
  VectorXd x_hat0;
  Schedule schedule;
  ExcitationSpec excitation;
  /// Observer gain supplied directly; when empty it is placed from
  /// schedule.observer_poles.
  MatrixXd K3;
  /// Default simulated horizon, seconds.
  double horizon = 50.0;
};

struct QuadcopterParams {
  double arm_length = 0.092;  // m
  double i_xx = 0.001225;     // kg m^2
  double i_yy = 0.001234;
  double i_zz = 0.002303;
  double k_t = 0.01;  // aerodynamic drag
  double g = 9.81;
  double mass = 0.552;  // kg
  double k_p11 = 5.25;
  double k_p12 = 6.0;
  double k_p13 = 3.0;
  double k_p21 = 2.0;
  double k_p22 = 1.0;
  double k_p23 = 0.35;
  double k_d1 = 0.5;
  double k_d2 = 0.4;
  double k_d3 = 0.1;

  double b1() const { return arm_length / i_xx; }
  double b2() const { return arm_length / i_yy; }
  double b3() const { return 1.0 / i_zz; }
};

/// State order of the quadcopter model.
enum QuadState : int {
  kX, kY, kZ, kXDot, kYDot, kZDot, kPhi, kTheta, kPsi, kPhiDot, kThetaDot,
  kPsiDot
};
/// Input order: desired velocities and yaw rate.
enum QuadInput : int { kXDotCmd, kYDotCmd, kZDotCmd, kPsiDotCmd };

/// Decoupled 3-state system whose IRL problem has a two-parameter family of
/// equivalent solutions.
Scenario academic_scenario();

/// 12-state linearized quadcopter under a velocity-command autopilot with a
/// surrogate LQR pilot.
Scenario quadcopter_scenario(const QuadcopterParams& p = {});

/// The quadcopter (A, B) pair alone.
LtiSystem quadcopter_system(const QuadcopterParams& p);

/// K3 from the scenario: the supplied gain, or pole placement.
MatrixXd scenario_observer_gain(const Scenario& scn);

}  // namespace hso
