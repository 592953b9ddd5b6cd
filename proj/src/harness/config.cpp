#include "hso/harness/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hso::harness {
namespace {

struct Value {
  std::string text;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const Value& v) {
  const std::string s = trim(v.text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key, v.line,
                      "line " + std::to_string(v.line) + ": key '" + key +
                          "' expects a number, got '" + s + "'");
  }
  return out;
}

long to_long(const std::string& key, const Value& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) {
    throw ConfigError(key, v.line,
                      "line " + std::to_string(v.line) + ": key '" + key +
                          "' expects an integer");
  }
  return static_cast<long>(d);
}

bool to_bool(const std::string& key, const Value& v) {
  const std::string s = trim(v.text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key, v.line,
                    "line " + std::to_string(v.line) + ": key '" + key +
                        "' expects true/false");
}

std::vector<double> to_list(const std::string& key, const Value& v) {
  std::vector<double> out;
  std::string s = v.text;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, {tok, v.line}));
  if (out.empty()) {
    throw ConfigError(key, v.line,
                      "line " + std::to_string(v.line) + ": key '" + key +
                          "' expects a list of numbers");
  }
  return out;
}

MatrixXd to_matrix(const std::string& key, const Value& v) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(v.text);
  std::string row;
  while (std::getline(is, row, ';')) {
    if (trim(row).empty()) continue;
    rows.push_back(to_list(key, {row, v.line}));
  }
  if (rows.empty()) {
    throw ConfigError(key, v.line, "key '" + key + "' expects a matrix");
  }
  const std::size_t cols = rows.front().size();
  MatrixXd m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw ConfigError(key, v.line,
                        "line " + std::to_string(v.line) + ": key '" + key +
                            "' has ragged rows");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

VectorXd to_vector(const std::string& key, const Value& v) {
  const std::vector<double> l = to_list(key, v);
  return Eigen::Map<const VectorXd>(l.data(), static_cast<Eigen::Index>(l.size()));
}

[[noreturn]] void invalid(const std::string& key, int line,
                          const std::string& why) {
  throw ConfigError(key, line, "key '" + key + "': " + why);
}

using Setter = std::function<void(RunConfig&, const std::string&, const Value&)>;

QuadcopterParams quad_params(const std::map<std::string, Value>& kv) {
  QuadcopterParams p;
  const std::map<std::string, double*> fields = {
      {"quad.arm_length", &p.arm_length}, {"quad.i_xx", &p.i_xx},
      {"quad.i_yy", &p.i_yy},             {"quad.i_zz", &p.i_zz},
      {"quad.k_t", &p.k_t},               {"quad.g", &p.g},
      {"quad.mass", &p.mass},             {"quad.k_p11", &p.k_p11},
      {"quad.k_p12", &p.k_p12},           {"quad.k_p13", &p.k_p13},
      {"quad.k_p21", &p.k_p21},           {"quad.k_p22", &p.k_p22},
      {"quad.k_p23", &p.k_p23},           {"quad.k_d1", &p.k_d1},
      {"quad.k_d2", &p.k_d2},             {"quad.k_d3", &p.k_d3},
  };
  for (const auto& [key, ptr] : fields) {
    if (auto it = kv.find(key); it != kv.end()) *ptr = to_double(key, it->second);
  }
  return p;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [](auto member) {
      return [member](RunConfig& c, const std::string& k, const Value& v) {
        member(c) = to_double(k, v);
      };
    };
    t["run.T"] = num([](RunConfig& c) -> double& { return c.horizon; });
    t["run.h"] = num([](RunConfig& c) -> double& { return c.step; });
    t["run.log_period"] =
        num([](RunConfig& c) -> double& { return c.log_period; });
    t["run.seed"] = [](RunConfig& c, const std::string& k, const Value& v) {
      const long s = to_long(k, v);
      if (s < 0) invalid(k, v.line, "seed must be non-negative");
      c.scenario.excitation.seed = static_cast<std::uint64_t>(s);
    };
    t["run.output_dir"] = [](RunConfig& c, const std::string&, const Value& v) {
      c.output_dir = trim(v.text);
    };
    t["run.emit_svg"] = [](RunConfig& c, const std::string& k, const Value& v) {
      c.emit_svg = to_bool(k, v);
    };

    auto sched = [&num](auto member) { return num(member); };
    t["scenario.epsilon"] = sched(
        [](RunConfig& c) -> double& { return c.scenario.schedule.epsilon; });
    t["scenario.r1"] =
        sched([](RunConfig& c) -> double& { return c.scenario.schedule.r1; });
    t["scenario.k4"] =
        sched([](RunConfig& c) -> double& { return c.scenario.schedule.k4; });
    t["scenario.data_period"] = sched(
        [](RunConfig& c) -> double& { return c.scenario.schedule.data_period; });
    t["scenario.purge_period"] = sched([](RunConfig& c) -> double& {
      return c.scenario.schedule.purge_period;
    });
    t["scenario.cond_threshold"] = sched([](RunConfig& c) -> double& {
      return c.scenario.schedule.cond_threshold;
    });
    t["scenario.stack_size"] = [](RunConfig& c, const std::string& k,
                                  const Value& v) {
      c.scenario.schedule.stack_size = to_long(k, v);
    };
    t["scenario.purge_policy"] = [](RunConfig& c, const std::string& k,
                                    const Value& v) {
      const std::string s = trim(v.text);
      if (s == "and") {
        c.scenario.schedule.purge_policy = PurgePolicy::kAnd;
      } else if (s == "or") {
        c.scenario.schedule.purge_policy = PurgePolicy::kOr;
      } else {
        invalid(k, v.line, "expected 'and' or 'or'");
      }
    };
    t["scenario.observer_poles"] = [](RunConfig& c, const std::string& k,
                                      const Value& v) {
      c.scenario.schedule.observer_poles = to_list(k, v);
    };
    t["scenario.x0"] = [](RunConfig& c, const std::string& k, const Value& v) {
      c.scenario.x0 = to_vector(k, v);
    };
    t["scenario.x_hat0"] = [](RunConfig& c, const std::string& k,
                              const Value& v) {
      c.scenario.x_hat0 = to_vector(k, v);
    };

    t["excitation.count"] = [](RunConfig& c, const std::string& k,
                               const Value& v) {
      c.scenario.excitation.count = static_cast<int>(to_long(k, v));
    };
    t["excitation.amplitude"] = num(
        [](RunConfig& c) -> double& { return c.scenario.excitation.amplitude; });
    t["excitation.freq_min"] = num([](RunConfig& c) -> double& {
      return c.scenario.excitation.freq_lo_hz;
    });
    t["excitation.freq_max"] = num([](RunConfig& c) -> double& {
      return c.scenario.excitation.freq_hi_hz;
    });
    t["excitation.phase_min"] = num(
        [](RunConfig& c) -> double& { return c.scenario.excitation.phase_lo; });
    t["excitation.phase_max"] = num(
        [](RunConfig& c) -> double& { return c.scenario.excitation.phase_hi; });
    t["excitation.channels"] = [](RunConfig& c, const std::string& k,
                                  const Value& v) {
      c.scenario.excitation.target_channels.clear();
      for (double d : to_list(k, v)) {
        c.scenario.excitation.target_channels.push_back(static_cast<int>(d));
      }
    };
    t["excitation.recorded_input"] = [](RunConfig& c, const std::string& k,
                                        const Value& v) {
      const std::string s = trim(v.text);
      if (s == "expert") {
        c.scenario.excitation.recorded_input = RecordedInput::kExpertCommand;
      } else if (s == "applied") {
        c.scenario.excitation.recorded_input = RecordedInput::kAppliedInput;
      } else {
        invalid(k, v.line, "expected 'expert' or 'applied'");
      }
    };

    auto mat = [](auto member) {
      return [member](RunConfig& c, const std::string& k, const Value& v) {
        member(c) = to_matrix(k, v);
      };
    };
    t["system.A"] = mat([](RunConfig& c) -> MatrixXd& { return c.scenario.sys.A; });
    t["system.B"] = mat([](RunConfig& c) -> MatrixXd& { return c.scenario.sys.B; });
    t["system.C"] = mat([](RunConfig& c) -> MatrixXd& { return c.scenario.sys.C; });
    t["cost.Q"] =
        mat([](RunConfig& c) -> MatrixXd& { return c.scenario.expert_cost.Q; });
    t["cost.R"] =
        mat([](RunConfig& c) -> MatrixXd& { return c.scenario.expert_cost.R; });
    t["observer.K3"] = mat([](RunConfig& c) -> MatrixXd& { return c.scenario.K3; });

    t["care.tol"] = num([](RunConfig& c) -> double& { return c.care.tol; });
    t["care.t_max"] = num([](RunConfig& c) -> double& { return c.care.t_max; });
    t["care.step"] = num([](RunConfig& c) -> double& { return c.care.step; });
    t["certify.equivalence_rel_tol"] =
        num([](RunConfig& c) -> double& { return c.equivalence_rel_tol; });
    t["certify.hjb_tol"] = num([](RunConfig& c) -> double& { return c.hjb_tol; });
    t["fi.tol"] = num([](RunConfig& c) -> double& { return c.fi_tol; });
    t["numerics.rank_tol"] =
        num([](RunConfig& c) -> double& { return c.rank_tol; });
    return t;
  }();
  return table;
}

Scenario custom_base(const std::map<std::string, Value>& kv) {
  for (const char* key : {"system.A", "system.B", "cost.Q", "cost.R"}) {
    if (!kv.count(key)) {
      throw ConfigError(key, 0,
                        std::string("scenario 'custom' requires key '") + key +
                            "'");
    }
  }
  Scenario s = academic_scenario();
  s.name = "custom";
  const MatrixXd a = to_matrix("system.A", kv.at("system.A"));
  const MatrixXd b = to_matrix("system.B", kv.at("system.B"));
  s.sys.A = a;
  s.sys.B = b;
  s.sys.C = MatrixXd::Identity(a.rows(), a.rows());
  s.x0 = VectorXd::Constant(a.rows(), 0.5);
  s.x_hat0 = VectorXd::Zero(a.rows());
  s.schedule.stack_size = BasisLayout(a.rows(), b.cols()).reduced_size();
  s.schedule.observer_poles.assign(static_cast<std::size_t>(a.rows()), -1.0);
  return s;
}

void validate(RunConfig& c, const std::map<std::string, Value>& kv) {
  auto line_of = [&](const std::string& key) {
    auto it = kv.find(key);
    return it == kv.end() ? 0 : it->second.line;
  };
  auto require = [&](bool ok, const std::string& key, const std::string& why) {
    if (!ok) invalid(key, line_of(key), why);
  };
  const Scenario& s = c.scenario;
  const Schedule& sch = s.schedule;
  require(c.horizon > 0.0, "run.T", "must be > 0");
  require(c.step > 0.0, "run.h", "must be > 0");
  require(sch.data_period > 0.0, "scenario.data_period", "must be > 0");
  require(c.step <= sch.data_period, "run.h",
          "must not exceed scenario.data_period");
  require(c.log_period >= c.step, "run.log_period", "must be >= run.h");
  require(sch.epsilon >= 0.0, "scenario.epsilon", "must be >= 0");
  require(sch.r1 > 0.0, "scenario.r1", "must be > 0");
  require(sch.k4 > 0.0, "scenario.k4", "must be > 0");
  require(sch.purge_period >= 0.0, "scenario.purge_period", "must be >= 0");
  require(sch.cond_threshold >= 1.0, "scenario.cond_threshold", "must be >= 1");
  require(sch.stack_size > 0, "scenario.stack_size", "must be > 0");
  require(s.excitation.count >= 0, "excitation.count", "must be >= 0");
  require(s.excitation.freq_lo_hz <= s.excitation.freq_hi_hz,
          "excitation.freq_max", "frequency range must be ascending");
  require(s.excitation.phase_lo <= s.excitation.phase_hi,
          "excitation.phase_max", "phase range must be ascending");
  require(c.equivalence_rel_tol > 0.0, "certify.equivalence_rel_tol",
          "must be > 0");
  require(c.hjb_tol > 0.0, "certify.hjb_tol", "must be > 0");
  require(c.fi_tol > 0.0, "fi.tol", "must be > 0");
  require(c.rank_tol > 0.0, "numerics.rank_tol", "must be > 0");
  require(c.care.tol > 0.0 && c.care.step > 0.0 && c.care.t_max > 0.0,
          "care.step", "care tolerances must be > 0");

  const Eigen::Index n = s.sys.A.rows();
  const Eigen::Index m = s.sys.B.cols();
  require(s.sys.A.cols() == n, "system.A", "must be square");
  require(s.sys.B.rows() == n, "system.B", "must have as many rows as A");
  require(s.sys.C.cols() == n, "system.C", "must have as many columns as A");
  require(s.expert_cost.Q.rows() == n && s.expert_cost.Q.cols() == n, "cost.Q",
          "must be n x n");
  require(s.expert_cost.R.rows() == m && s.expert_cost.R.cols() == m, "cost.R",
          "must be m x m");
  require(s.x0.size() == n, "scenario.x0", "must have n entries");
  require(s.x_hat0.size() == n, "scenario.x_hat0", "must have n entries");
  if (s.K3.size() == 0) {
    require(static_cast<Eigen::Index>(sch.observer_poles.size()) == n,
            "scenario.observer_poles", "must have n entries");
    for (double p : sch.observer_poles) {
      require(p < 0.0, "scenario.observer_poles", "poles must be negative");
    }
  } else {
    require(s.K3.rows() == n && s.K3.cols() == s.sys.C.rows(), "observer.K3",
            "must be n x L");
  }
  for (int ch : s.excitation.target_channels) {
    require(ch >= 0 && ch < m, "excitation.channels", "channel out of range");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Value> kv;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", line_no,
                        "line " + std::to_string(line_no) +
                            ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("", line_no,
                        "line " + std::to_string(line_no) + ": empty key");
    }
    const bool known = key == "scenario" || key.rfind("quad.", 0) == 0 ||
                       setters().count(key);
    if (!known) {
      throw ConfigError(key, line_no,
                        "line " + std::to_string(line_no) + ": unknown key '" +
                            key + "'");
    }
    if (kv.count(key)) {
      throw ConfigError(key, line_no,
                        "line " + std::to_string(line_no) + ": duplicate key '" +
                            key + "'");
    }
    kv[key] = {value, line_no};
  }

  RunConfig c;
  if (auto it = kv.find("scenario"); it != kv.end()) {
    c.scenario_kind = trim(it->second.text);
  }
  const bool has_quad_keys = std::any_of(kv.begin(), kv.end(), [](auto& e) {
    return e.first.rfind("quad.", 0) == 0;
  });
  if (c.scenario_kind == "academic") {
    c.scenario = academic_scenario();
  } else if (c.scenario_kind == "quadcopter") {
    static const std::set<std::string> quad_keys = {
        "quad.arm_length", "quad.i_xx",  "quad.i_yy",  "quad.i_zz",
        "quad.k_t",        "quad.g",     "quad.mass",  "quad.k_p11",
        "quad.k_p12",      "quad.k_p13", "quad.k_p21", "quad.k_p22",
        "quad.k_p23",      "quad.k_d1",  "quad.k_d2",  "quad.k_d3"};
    for (const auto& [key, v] : kv) {
      if (key.rfind("quad.", 0) == 0 && !quad_keys.count(key)) {
        throw ConfigError(key, v.line,
                          "line " + std::to_string(v.line) +
                              ": unknown key '" + key + "'");
      }
    }
    c.scenario = quadcopter_scenario(quad_params(kv));
  } else if (c.scenario_kind == "custom") {
    c.scenario = custom_base(kv);
  } else {
    invalid("scenario", kv.at("scenario").line,
            "expected academic, quadcopter or custom");
  }
  if (has_quad_keys && c.scenario_kind != "quadcopter") {
    throw ConfigError("quad", 0,
                      "quad.* keys are only valid with scenario = quadcopter");
  }
  c.horizon = c.scenario.horizon;
  c.log_period = c.scenario.schedule.data_period;

  for (const auto& [key, v] : kv) {
    if (key == "scenario" || key.rfind("quad.", 0) == 0) continue;
    setters().at(key)(c, key, v);
  }

  if (c.output_dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    c.output_dir = (env && *env) ? env : "hso_out";
  }
  validate(c, kv);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", 0, "cannot open config file '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace hso::harness
