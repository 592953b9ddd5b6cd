#include "hso/simulation.hpp"

#include <cmath>
#include <memory>

namespace hso {
namespace {

long steps_per(double period, double h, const char* what) {
  const double ratio = period / h;
  const long k = std::lround(ratio);
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-6 * ratio) {
    throw InvalidArgument(std::string(what) +
                          " must be a positive integer multiple of the step");
  }
  return k;
}

}  // namespace

SimulationResult simulate_expert(const Scenario& scn,
                                 const SimulationOptions& options,
                                 const SimulationHooks& hooks) {
  const LtiSystem& sys = scn.sys;
  const Schedule& sched = scn.schedule;
  const Eigen::Index n = sys.states();
  const Eigen::Index m = sys.inputs();
  if (!(options.horizon > 0.0) || !(options.step > 0.0)) {
    throw InvalidArgument("simulate_expert: horizon and step must be > 0");
  }
  if (scn.x0.size() != n || scn.x_hat0.size() != n) {
    throw DimensionMismatch("simulate_expert: x0 / x_hat0 length");
  }
  const long data_every = steps_per(sched.data_period, options.step,
                                    "data_period");
  const long n_steps = std::lround(options.horizon / options.step);

  SimulationResult res;
  res.expert = lqr_gain(sys.A, sys.B, scn.expert_cost.Q, scn.expert_cost.R,
                        options.care);
  res.K3 = scenario_observer_gain(scn);
  const MatrixXd& k_ep = res.expert.K;
  const MatrixXd& k3 = res.K3;

  auto model = std::make_shared<RegressorModel>(
      RegressorModel{sys.A, sys.B, sched.r1});
  const StackSettings settings{sched.stack_size, sched.epsilon,
                               sched.cond_threshold};
  res.h1 = HistoryStack(model, settings);
  res.h2 = HistoryStack(model, settings);
  res.schedule.purge_period = sched.purge_period;
  res.schedule.policy = sched.purge_policy;
  res.schedule.last_swap = 0.0;

  const BasisLayout layout(n, m);
  const Eigen::Index p = layout.reduced_size();
  const Excitation excitation(scn.excitation, m);
  const bool record_applied =
      scn.excitation.recorded_input == RecordedInput::kAppliedInput;

  WeightUpdateLaw law;
  VectorXd x = scn.x0;
  VectorXd x_hat = scn.x_hat0;
  VectorXd w = VectorXd::Zero(p);
  VectorXd z(2 * n + p);

  auto field = [&](double t, const VectorXd& s) -> VectorXd {
    const auto xs = s.head(n);
    const auto xh = s.segment(n, n);
    const VectorXd u_applied = k_ep * xs + excitation(t);
    VectorXd out(2 * n + p);
    out.head(n) = sys.A * xs + sys.B * u_applied;
    out.segment(n, n) =
        sys.A * xh + sys.B * u_applied + k3 * (sys.C * xs - sys.C * xh);
    out.tail(p) = law.rate(s.tail(p));
    return out;
  };

  auto note_fi = [&](const HistoryStack& stack, double t) {
    if (!options.track_informativity || res.first_fi_time) return;
    if (stack.size() < n) return;
    const InformativityReport rep =
        informativity_report(stack, options.fi_tol, options.rank_tol);
    if (rep.fi_ok) res.first_fi_time = t;
  };

  VectorXd d_vec;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * options.step;
    const VectorXd u_cmd = k_ep * x;
    const VectorXd u_applied = u_cmd + excitation(t);
    const VectorXd& u_rec = record_applied ? u_applied : u_cmd;

    StepRecord rec;
    rec.step = k;
    rec.t = t;
    if (k % data_every == 0) {
      rec.sampled = true;
      res.h2.try_add(StackEntry{t, x_hat, u_rec});
      note_fi(res.h2, t);
      if (swap_and_purge(res.h1, res.h2, t, res.schedule) ==
          SwapReason::kSwapped) {
        law = WeightUpdateLaw(res.h1, sched.k4);
        rec.swapped = true;
        res.swap_times.push_back(t);
        res.last_h1_informativity = informativity_report(
            res.h1, options.fi_tol, options.rank_tol);
        if (res.last_h1_informativity->fi_ok && !res.first_fi_time &&
            options.track_informativity) {
          res.first_fi_time = t;
        }
      }
    }
    if (law.active()) {
      d_vec = law.delta(w);
      if (rec.swapped && !res.delta_at_first_swap) {
        res.delta_at_first_swap = d_vec.norm();
      }
    } else {
      d_vec.resize(0);
    }

    rec.x = &x;
    rec.x_hat = &x_hat;
    rec.u = &u_rec;
    rec.u_applied = &u_applied;
    rec.w = &w;
    rec.delta = &d_vec;
    rec.h1 = &res.h1;
    rec.h2 = &res.h2;
    rec.law = &law;
    rec.h1_informativity =
        res.last_h1_informativity ? &*res.last_h1_informativity : nullptr;
    rec.swap_count = res.schedule.swap_count;
    if (rec.swapped && hooks.on_swap) hooks.on_swap(rec);
    if (hooks.on_step) hooks.on_step(rec);

    if (k == n_steps) break;
    z << x, x_hat, w;
    z = rk4_step(field, t, z, options.step);
    x = z.head(n);
    x_hat = z.segment(n, n);
    w = z.tail(p);
  }

  res.final_state = {x_hat, w, static_cast<double>(n_steps) * options.step};
  res.final_x = x;
  res.steps = n_steps;
  return res;
}

}  // namespace hso
