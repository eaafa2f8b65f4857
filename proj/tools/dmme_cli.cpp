// Command-line front end: canned experiment runs, stationary solves, the
// frequency-sign scan, and the verification battery.
//
// Exit codes: 0 success, 1 invalid input (config/CLI), 2 runtime or check
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dmme/dmme.hpp"
#include "dmme/selfcheck.hpp"

namespace fs = std::filesystem;

namespace {

void write_outputs(const dmme::run_output& out, const std::string& out_dir,
                   const std::string& summary_name) {
  fs::create_directories(out_dir);
  for (const auto& [name, content] : out.files) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw dmme::validation_error("cannot write output file " + name);
    f << content;
  }
  std::ofstream s(fs::path(out_dir) / summary_name, std::ios::binary);
  if (!s) throw dmme::validation_error("cannot write " + summary_name);
  s << out.summary.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driven two-qubit entanglement protocol toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int grid_override = 0;
  app.add_option("--config", config_path, "key=value config file");
  auto* o_out = app.add_option("--out", out_override,
                               "output directory (overrides config out_dir)");
  auto* o_grid = app.add_option("--grid", grid_override,
                                "output grid resolution (overrides config)");

  auto* c_fig1 = app.add_subcommand("figure1", "protocol infidelity, field and rate series");
  auto* c_fig2 = app.add_subcommand("figure2", "level-shift on/off comparison");
  auto* c_sim = app.add_subcommand("simulate", "single trajectory from the configured initial state");
  auto* c_steady = app.add_subcommand("steady", "stationary state for constant controls");
  auto* c_scan = app.add_subcommand("scan-g2m", "bisect the sign change of min_t alpha32");
  auto* c_self = app.add_subcommand("selfcheck", "run the verification battery");
  for (auto* sc : {c_fig1, c_fig2, c_sim, c_steady, c_scan, c_self}) {
    sc->fallthrough();  // accept the global options after the subcommand too
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    dmme::run_config cfg = dmme::load_config(config_path);
    if (o_out->count() > 0) cfg.out_dir = out_override;
    if (o_grid->count() > 0) cfg.grid = grid_override;
    dmme::validate(cfg);  // command-line overrides go through the same checks

    if (c_fig1->parsed()) {
      write_outputs(dmme::run_figure1(cfg), cfg.out_dir, "figure1_summary.json");
    } else if (c_fig2->parsed()) {
      write_outputs(dmme::run_figure2(cfg), cfg.out_dir, "figure2_summary.json");
    } else if (c_sim->parsed()) {
      write_outputs(dmme::run_simulate(cfg), cfg.out_dir, "simulate_summary.json");
    } else if (c_steady->parsed()) {
      write_outputs(dmme::run_steady(cfg), cfg.out_dir, "steady_summary.json");
    } else if (c_scan->parsed()) {
      write_outputs(dmme::run_scan(cfg), cfg.out_dir, "scan_summary.json");
    } else if (c_self->parsed()) {
      auto checks = dmme::run_selfcheck(cfg);
      dmme::run_output out;
      out.summary = dmme::selfcheck_summary(checks);
      write_outputs(out, cfg.out_dir, "selfcheck_summary.json");
      bool all = true;
      for (const auto& c : checks) {
        std::printf("%-42s %s  (measured %.3g, threshold %.3g)\n", c.name.c_str(),
                    c.passed ? "PASS" : "FAIL", c.measured, c.threshold);
        all = all && c.passed;
      }
      if (!all) {
        std::fprintf(stderr, "selfcheck: at least one check failed\n");
        return 2;
      }
    }
  } catch (const dmme::validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const dmme::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 2;
  }
  return 0;
}
