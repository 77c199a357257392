// piston — scenario runner, parameter sweeps, figure presets and the
// cross-engine validation suite for the photon-piston simulator.
//
// Exit codes: 0 success, 1 configuration error, 2 validation failure,
// 3 resource cap exceeded.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "piston/fock.hpp"

int main(int argc, char** argv) {
  CLI::App app{"photon piston simulator"};
  app.require_subcommand(1);

  piston::cli::GlobalOptions opts;
  if (const char* env = std::getenv("PISTON_OUT_DIR")) opts.out_dir = env;

  std::string config_path, engine_name, axis, values_spec, dump_state_path;
  std::string summary = "delta_h_avg";
  std::string preset_name;
  bool emit_svg = false;
  double perturb_c = 0.0;

  auto add_common = [&opts](CLI::App* cmd) {
    cmd->add_option("--out", opts.out_dir, "output directory (default $PISTON_OUT_DIR or .)");
    cmd->add_option("--jobs", opts.jobs, "worker threads (default: all cores)");
  };

  CLI::App* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("config", config_path, "scenario config file")->required();
  run->add_option("--engine", engine_name, "analytic|oracle|both (overrides the config)");
  run->add_flag("--svg", emit_svg, "also emit an SVG line chart");
  run->add_option("--dump-state", dump_state_path,
                  "write the final oracle state as a binary dump");
  add_common(run);

  CLI::App* sweep = app.add_subcommand("sweep", "sweep one axis of a scenario");
  sweep->add_option("config", config_path, "scenario config file")->required();
  sweep->add_option("--axis", axis, "theta|mean_n|g|n_th")->required();
  sweep->add_option("--values", values_spec, "V0:V1:N[:log]")->required();
  sweep->add_option("--summary", summary, "delta_h_avg|g2_avg|long_time");
  add_common(sweep);

  CLI::App* preset = app.add_subcommand("preset", "run a named end-to-end scenario");
  preset->add_option("name", preset_name, "fig2|fig4|hom|mu-eta|backaction")->required();
  add_common(preset);

  CLI::App* validate = app.add_subcommand("validate", "cross-engine validation suite");
  validate->add_option("--perturb-c", perturb_c,
                       "test hook: bias the closed-form c(t) by this amount");
  add_common(validate);

  try {
    app.parse(argc, argv);
    if (run->parsed()) {
      std::optional<piston::Engine> engine;
      if (!engine_name.empty()) engine = piston::engine_from_string(engine_name);
      piston::cli::cmd_run(config_path, engine, emit_svg, dump_state_path, opts);
    } else if (sweep->parsed()) {
      piston::cli::cmd_sweep(config_path, axis, values_spec, summary, opts);
    } else if (preset->parsed()) {
      piston::cli::cmd_preset(preset_name, opts);
    } else if (validate->parsed()) {
      if (!piston::cli::cmd_validate(opts, perturb_c)) return 2;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const piston::fock::DimensionCapError& e) {
    std::cerr << "error: " << e.what()
              << "\nhint: reduce the cutoffs or raise dimension_cap in [run]\n";
    return 3;
  } catch (const piston::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
