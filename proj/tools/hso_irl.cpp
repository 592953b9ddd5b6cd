#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "hso/harness/config.hpp"
#include "hso/harness/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotEquivalent = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online inverse reinforcement learning with a history stack observer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool emit_svg = false;
  bool require_equivalence = false;

  auto* run = app.add_subcommand("run", "simulate a scenario and write CSV/SVG artifacts");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--emit-svg", emit_svg, "write SVG plots");
  run->add_flag("--require-equivalence", require_equivalence,
                "exit with code 2 unless the final weights certify");

  auto* fi = app.add_subcommand("check-informativity",
                                "report when the recorded data becomes finitely informative");
  fi->add_option("--config", config_path, "config file")->required();

  auto* lqr = app.add_subcommand("synth-lqr", "print the expert gain and Riccati solution");
  lqr->add_option("--config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    hso::harness::RunConfig config = hso::harness::load_config(config_path);
    if (*run) {
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (emit_svg) config.emit_svg = true;
      const hso::harness::RunSummary summary = hso::harness::run(config);
      std::cout << summary.line() << std::endl;
      if (require_equivalence && !summary.equivalent) return kExitNotEquivalent;
    } else if (*fi) {
      hso::harness::print_informativity(std::cout,
                                        hso::harness::check_informativity(config));
    } else if (*lqr) {
      hso::harness::print_expert(std::cout, hso::harness::synth_lqr(config));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
