#include "hso/harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "hso/harness/svg_plot.hpp"

namespace hso::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  os << buf;
}

SimulationOptions sim_options(const RunConfig& c, bool track_fi) {
  SimulationOptions o;
  o.horizon = c.horizon;
  o.step = c.step;
  o.care = c.care;
  o.track_informativity = track_fi;
  o.fi_tol = c.fi_tol;
  o.rank_tol = c.rank_tol;
  return o;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

/// Metrics derived from one step record.
struct Metrics {
  double delta_norm = kNaN;
  double gain_error = kNaN;
  double sigma_u_residual = kNaN;
  double cond_reg = kNaN;
  VectorXd q_diag;
  VectorXd r_diag;
};

Metrics metrics_for(const StepRecord& rec, const BasisLayout& layout,
                    const LtiSystem& sys, const MatrixXd& k_ep, double r1) {
  Metrics mt;
  mt.q_diag = VectorXd::Constant(layout.n, kNaN);
  mt.r_diag = VectorXd::Constant(layout.m, kNaN);
  if (rec.delta->size() > 0) mt.delta_norm = rec.delta->norm();
  if (rec.h1_informativity) {
    mt.sigma_u_residual = rec.h1_informativity->sigma_u_residual;
  }
  if (!rec.h1->empty()) mt.cond_reg = rec.h1->condition();
  const WeightVector wv = WeightVector::from_reduced(layout, *rec.w, r1);
  mt.q_diag = sym_unvec(wv.w_Q, layout.n).diagonal();
  try {
    const ExtractedSolution sol = extract_solution(wv, sys.B);
    mt.r_diag = sol.R.diagonal();
    mt.gain_error = (sol.K - k_ep).norm();
  } catch (const ExtractionError&) {
  }
  return mt;
}

void write_matrix_rows(std::ostream& os, const std::string& name,
                       const MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      os << name << ',' << i << ',' << j << ',';
      put(os, m(i, j));
      os << '\n';
    }
  }
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::vector<std::string> timeseries_header(Eigen::Index n, Eigen::Index m) {
  std::vector<std::string> h = {"t", "delta_norm", "gain_error_fro",
                                "sigma_u_residual", "cond_reg"};
  for (Eigen::Index i = 0; i < n; ++i) h.push_back("q_hat_" + std::to_string(i));
  for (Eigen::Index i = 0; i < m; ++i) h.push_back("r_hat_" + std::to_string(i));
  for (Eigen::Index i = 0; i < n; ++i) h.push_back("x_" + std::to_string(i));
  for (Eigen::Index i = 0; i < n; ++i) h.push_back("x_hat_" + std::to_string(i));
  for (Eigen::Index i = 0; i < m; ++i) h.push_back("u_" + std::to_string(i));
  return h;
}

std::string RunSummary::line() const {
  std::ostringstream os;
  auto num = [&](const char* key, double v) {
    os << ' ' << key << '=';
    put(os, v);
  };
  os << "scenario=" << scenario;
  num("T", horizon);
  os << " swaps=" << swap_count;
  num("delta_norm", final_delta_norm);
  num("gain_error", final_gain_error);
  num("gain_error_rel", final_gain_error / expert_gain_norm);
  os << " equivalent=" << yes_no(equivalent);
  os << " fi_at_end=" << yes_no(fi_ok_at_end);
  if (first_fi_time) {
    num("first_fi_t", *first_fi_time);
  } else {
    os << " first_fi_t=never";
  }
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.2f", wall_clock_s);
  os << " wall_s=" << wall;
  return os.str();
}

RunSummary run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario& scn = config.scenario;
  const LtiSystem& sys = scn.sys;
  const BasisLayout layout(sys.states(), sys.inputs());
  const double r1 = scn.schedule.r1;

  std::filesystem::create_directories(config.output_dir);
  std::ofstream ts = open_out(config.output_dir / "timeseries.csv");
  {
    const auto header = timeseries_header(layout.n, layout.m);
    for (std::size_t i = 0; i < header.size(); ++i) {
      ts << (i ? "," : "") << header[i];
    }
    ts << '\n';
  }

  const long log_every =
      std::max(1L, std::lround(config.log_period / config.step));
  const long last_step = std::lround(config.horizon / config.step);
  MatrixXd k_ep;
  std::vector<double> plot_t, plot_delta, plot_gain;
  std::vector<std::vector<double>> plot_q(static_cast<std::size_t>(layout.n));
  std::vector<std::vector<double>> plot_r(static_cast<std::size_t>(layout.m));
  double last_delta = kNaN;
  double last_gain = kNaN;

  SimulationHooks hooks;
  hooks.on_step = [&](const StepRecord& rec) {
    if (rec.step % log_every != 0 && rec.step != last_step) return;
    if (k_ep.size() == 0) {
      throw Error("run: expert gain unavailable in step hook");
    }
    const Metrics mt = metrics_for(rec, layout, sys, k_ep, r1);
    last_delta = mt.delta_norm;
    last_gain = mt.gain_error;
    put(ts, rec.t);
    for (double v : {mt.delta_norm, mt.gain_error, mt.sigma_u_residual,
                     mt.cond_reg}) {
      ts << ',';
      put(ts, v);
    }
    for (const VectorXd* v : {&mt.q_diag, &mt.r_diag, rec.x, rec.x_hat, rec.u}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        ts << ',';
        put(ts, (*v)(i));
      }
    }
    ts << '\n';
    if (config.emit_svg) {
      plot_t.push_back(rec.t);
      plot_delta.push_back(mt.delta_norm);
      plot_gain.push_back(mt.gain_error);
      for (Eigen::Index i = 0; i < layout.n; ++i) {
        plot_q[static_cast<std::size_t>(i)].push_back(mt.q_diag(i));
      }
      for (Eigen::Index i = 0; i < layout.m; ++i) {
        plot_r[static_cast<std::size_t>(i)].push_back(mt.r_diag(i));
      }
    }
  };

  SimulationResult res;
  try {
    // The expert gain is needed inside the hook; compute it up front with the
    // same options the simulation uses.
    k_ep = lqr_gain(sys.A, sys.B, scn.expert_cost.Q, scn.expert_cost.R,
                    config.care)
               .K;
    res = simulate_expert(scn, sim_options(config, true), hooks);
  } catch (...) {
    ts.flush();
    throw;
  }
  ts.close();

  RunSummary sum;
  sum.scenario = scn.name;
  sum.horizon = config.horizon;
  sum.final_delta_norm = last_delta;
  sum.final_gain_error = last_gain;
  sum.expert_gain_norm = res.expert.K.norm();
  sum.swap_count = res.schedule.swap_count;
  sum.first_fi_time = res.first_fi_time;
  sum.fi_ok_at_end =
      res.last_h1_informativity && res.last_h1_informativity->fi_ok;

  const WeightVector wv =
      WeightVector::from_reduced(layout, res.final_state.w, r1);
  if (!res.h1.empty()) {
    try {
      sum.certification = certify_equivalence(
          wv, res.h1, sys, res.expert.K,
          config.equivalence_rel_tol * sum.expert_gain_norm, config.hjb_tol);
      sum.equivalent = sum.certification->equivalent;
    } catch (const ExtractionError&) {
      sum.equivalent = false;
    }
  }

  {
    std::ofstream fs = open_out(config.output_dir / "final_solution.csv");
    fs << "name,row,col,value\n";
    write_matrix_rows(fs, "w", res.final_state.w);
    write_matrix_rows(fs, "K_expert", res.expert.K);
    write_matrix_rows(fs, "S_expert", res.expert.S);
    if (sum.certification) {
      const ExtractedSolution& s = sum.certification->solution;
      write_matrix_rows(fs, "S_hat", s.S);
      write_matrix_rows(fs, "Q_hat", s.Q);
      write_matrix_rows(fs, "R_hat", s.R);
      write_matrix_rows(fs, "K_hat", s.K);
      write_matrix_rows(fs, "hjb_pointwise",
                        sum.certification->pointwise_hjb_residuals);
    }
  }
  {
    std::ofstream hs = open_out(config.output_dir / "stack_h1.csv");
    res.h1.write_csv(hs);
  }

  if (config.emit_svg) {
    const auto& dir = config.output_dir;
    write_line_chart(dir / "delta_norm.svg", plot_t, {{"|Delta|", plot_delta}},
                     {.title = "Stack residual norm", .log_y = true});
    write_line_chart(dir / "gain_error.svg", plot_t,
                     {{"|K_hat - K_EP|_F", plot_gain}},
                     {.title = "Feedback gain error", .log_y = true});
    std::vector<Series> qs, rs;
    for (std::size_t i = 0; i < plot_q.size(); ++i) {
      qs.push_back({"Q_hat(" + std::to_string(i) + "," + std::to_string(i) + ")",
                    plot_q[i]});
    }
    for (std::size_t i = 0; i < plot_r.size(); ++i) {
      rs.push_back({"R_hat(" + std::to_string(i) + "," + std::to_string(i) + ")",
                    plot_r[i]});
    }
    write_line_chart(dir / "q_hat_diag.svg", plot_t, qs,
                     {.title = "Q_hat diagonal"});
    write_line_chart(dir / "r_hat_diag.svg", plot_t, rs,
                     {.title = "R_hat diagonal"});
  }

  sum.wall_clock_s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  return sum;
}

InformativitySummary check_informativity(const RunConfig& config) {
  const SimulationResult res = simulate_expert(
      config.scenario, sim_options(config, true), {});
  InformativitySummary s;
  s.first_fi_time = res.first_fi_time;
  s.active = res.last_h1_informativity;
  s.filling_size = res.h2.size();
  if (!res.h2.empty()) {
    s.filling = informativity_report(res.h2, config.fi_tol, config.rank_tol);
  }
  return s;
}

void print_informativity(std::ostream& os, const InformativitySummary& s) {
  if (s.first_fi_time) {
    os << "first_fi_t=";
    put(os, *s.first_fi_time);
    os << '\n';
  } else {
    os << "first_fi_t=never\n";
  }
  auto report = [&](const char* name, const InformativityReport& r) {
    os << name << ": span_rank=" << r.span_rank
       << " span_ok=" << yes_no(r.span_ok) << " sigma_u_residual=";
    put(os, r.sigma_u_residual);
    os << " sigma_u_norm=";
    put(os, r.sigma_u_norm);
    os << " degenerate=" << yes_no(r.degenerate)
       << " fi_ok=" << yes_no(r.fi_ok) << '\n';
  };
  if (s.active) {
    report("active_stack", *s.active);
  } else {
    os << "active_stack: none installed\n";
  }
  if (s.filling_size > 0) {
    report("filling_stack", s.filling);
  } else {
    os << "filling_stack: empty\n";
  }
}

ExpertPolicy synth_lqr(const RunConfig& config) {
  const Scenario& s = config.scenario;
  return lqr_gain(s.sys.A, s.sys.B, s.expert_cost.Q, s.expert_cost.R,
                  config.care);
}

void print_expert(std::ostream& os, const ExpertPolicy& p) {
  const Eigen::IOFormat f(Eigen::FullPrecision, 0, ", ", "\n", "  ");
  os << "K_EP =\n" << p.K.format(f) << "\nS =\n" << p.S.format(f)
     << "\nriccati_residual = ";
  put(os, p.riccati_residual);
  os << "\ndecay_factor = ";
  put(os, p.decay_factor);
  os << '\n';
}

}  // namespace hso::harness
