#include "hso/scenarios.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "hso/random.hpp"

namespace hso {

Excitation::Excitation(const ExcitationSpec& spec, Eigen::Index inputs)
    : inputs_(inputs), amplitude_(spec.amplitude) {
  if (spec.count < 0) throw InvalidArgument("excitation: count must be >= 0");
  if (spec.freq_hi_hz < spec.freq_lo_hz || spec.phase_hi < spec.phase_lo) {
    throw InvalidArgument("excitation: ranges must be ascending");
  }
  std::vector<int> channels = spec.target_channels;
  if (channels.empty()) {
    for (int c = 0; c < inputs; ++c) channels.push_back(c);
  }
  SplitMix64 rng(spec.seed);
  for (int c : channels) {
    if (c < 0 || c >= inputs) {
      throw InvalidArgument("excitation: target channel out of range");
    }
    for (int k = 0; k < spec.count; ++k) {
      const double f = rng.uniform(spec.freq_lo_hz, spec.freq_hi_hz);
      const double ph = rng.uniform(spec.phase_lo, spec.phase_hi);
      tones_.push_back({c, f, ph});
    }
  }
}

VectorXd Excitation::operator()(double t) const {
  VectorXd d = VectorXd::Zero(inputs_);
  for (const Tone& tone : tones_) {
    d(tone.channel) += amplitude_ * std::sin(2.0 * std::numbers::pi *
                                                 tone.freq_hz * t +
                                             tone.phase);
  }
  return d;
}

VectorXd excitation_signal(const ExcitationSpec& spec, Eigen::Index inputs,
                           double t) {
  return Excitation(spec, inputs)(t);
}

Scenario academic_scenario() {
  Scenario s;
  s.name = "academic";
  s.sys.A = VectorXd::Map(std::array{3.0, 5.0, 7.0}.data(), 3).asDiagonal();
  s.sys.B = VectorXd::Map(std::array{11.0, 13.0, 17.0}.data(), 3).asDiagonal();
  s.sys.C = MatrixXd::Identity(3, 3);
  s.expert_cost.Q =
      VectorXd::Map(std::array{1.0, 4.0, 3.0}.data(), 3).asDiagonal();
  s.expert_cost.R =
      VectorXd::Map(std::array{1.0, 1.75, 4.0}.data(), 3).asDiagonal();
  s.x0 = VectorXd::Constant(3, 0.5);
  s.x_hat0 = VectorXd::Zero(3);

  s.schedule.data_period = 0.08;
  s.schedule.purge_period = 2.0;
  s.schedule.cond_threshold = 1e8;
  s.schedule.epsilon = 1e-2;
  s.schedule.r1 = 1.0;
  s.schedule.k4 = 50.0;
  s.schedule.stack_size = BasisLayout(3, 3).reduced_size();
  s.schedule.observer_poles = {-0.1, -1.5, -2.0};

  s.excitation.count = 30;
  s.excitation.amplitude = 1.0;
  s.excitation.freq_lo_hz = 0.001;
  s.excitation.freq_hi_hz = 0.1;
  s.excitation.phase_lo = 0.0;
  s.excitation.phase_hi = std::numbers::pi;
  s.excitation.seed = 1;
  s.horizon = 50.0;
  return s;
}

LtiSystem quadcopter_system(const QuadcopterParams& p) {
  for (double v : {p.arm_length, p.i_xx, p.i_yy, p.i_zz, p.k_t, p.g, p.mass,
                   p.k_p11, p.k_p12, p.k_p13, p.k_p21, p.k_p22, p.k_p23,
                   p.k_d1, p.k_d2, p.k_d3}) {
    if (!(v > 0.0)) {
      throw InvalidArgument("quadcopter: parameters must be positive");
    }
  }
  constexpr double kPi = std::numbers::pi;
  LtiSystem sys;
  sys.A = MatrixXd::Zero(12, 12);
  sys.B = MatrixXd::Zero(12, 4);
  sys.C = MatrixXd::Identity(12, 12);
  auto& a = sys.A;
  auto& b = sys.B;

  a(kX, kXDot) = 1.0;
  a(kY, kYDot) = 1.0;
  a(kZ, kZDot) = 1.0;
  a(kPhi, kPhiDot) = 1.0;
  a(kTheta, kThetaDot) = 1.0;
  a(kPsi, kPsiDot) = 1.0;

  const double drag = p.k_t / p.mass;
  // x'' = -g theta - (k_t/m) x'
  a(kXDot, kTheta) = -p.g;
  a(kXDot, kXDot) = -drag;
  // y'' = g phi - (k_t/m) y'
  a(kYDot, kPhi) = p.g;
  a(kYDot, kYDot) = -drag;
  // z'' = k_p13 (z' - z'_d) - (k_t/m) z'
  a(kZDot, kZDot) = p.k_p13 - drag;
  b(kZDot, kZDotCmd) = -p.k_p13;

  // phi'' = b1 pi k_p21 k_p12 (y' - y'_d) / (4g) - b1 k_d1 phi' - b1 k_p21 phi
  const double roll = p.b1() * kPi * p.k_p21 * p.k_p12 / (4.0 * p.g);
  a(kPhiDot, kYDot) = roll;
  b(kPhiDot, kYDotCmd) = -roll;
  a(kPhiDot, kPhiDot) = -p.b1() * p.k_d1;
  a(kPhiDot, kPhi) = -p.b1() * p.k_p21;

  // theta'' = b2 pi k_p22 k_p11 (x'_d - x') / (4g) - b2 k_d2 theta'
  //           - b2 k_p22 theta
  const double pitch = p.b2() * kPi * p.k_p22 * p.k_p11 / (4.0 * p.g);
  a(kThetaDot, kXDot) = -pitch;
  b(kThetaDot, kXDotCmd) = pitch;
  a(kThetaDot, kThetaDot) = -p.b2() * p.k_d2;
  a(kThetaDot, kTheta) = -p.b2() * p.k_p22;

  // psi'' = b3 k_d3 (psi'_d - psi') - b3 k_p23 psi
  a(kPsiDot, kPsiDot) = -p.b3() * p.k_d3;
  b(kPsiDot, kPsiDotCmd) = p.b3() * p.k_d3;
  a(kPsiDot, kPsi) = -p.b3() * p.k_p23;
  return sys;
}

Scenario quadcopter_scenario(const QuadcopterParams& p) {
  Scenario s;
  s.name = "quadcopter";
  s.sys = quadcopter_system(p);
  VectorXd q(12);
  q << 9.5752, 6.9139, 2.8378, 0, 0, 0, 0, 0, 11.6834, 0, 0, 0;
  VectorXd r(4);
  r << 9.572, 3.4773, 14.4034, 0.1707;
  s.expert_cost.Q = q.asDiagonal();
  s.expert_cost.R = r.asDiagonal();
  s.x0 = VectorXd::Constant(12, 0.5);
  s.x_hat0 = VectorXd::Zero(12);

  s.schedule.data_period = 0.08;
  s.schedule.purge_period = 10.0;
  s.schedule.cond_threshold = 1e10;
  s.schedule.epsilon = 0.002;
  s.schedule.r1 = 1.0;
  s.schedule.k4 = 50.0;
  s.schedule.stack_size = BasisLayout(12, 4).reduced_size();
  s.schedule.observer_poles.assign(8, -1.0);
  s.schedule.observer_poles.insert(s.schedule.observer_poles.end(), 4, -2.0);

  s.excitation.count = 30;
  s.excitation.amplitude = 0.03;
  s.excitation.freq_lo_hz = 0.001;
  s.excitation.freq_hi_hz = 10.0;
  s.excitation.phase_lo = 0.0;
  s.excitation.phase_hi = std::numbers::pi;
  s.excitation.seed = 1;
  s.horizon = 60.0;
  return s;
}

MatrixXd scenario_observer_gain(const Scenario& scn) {
  if (scn.K3.size() != 0) {
    if (scn.K3.rows() != scn.sys.states() ||
        scn.K3.cols() != scn.sys.outputs()) {
      throw DimensionMismatch("observer.K3 must be n x L");
    }
    return scn.K3;
  }
  return observer_gain(scn.sys.A, scn.sys.C, scn.schedule.observer_poles);
}

}  // namespace hso
