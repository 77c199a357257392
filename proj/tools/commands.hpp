// commands.hpp — implementations behind the piston subcommands.

#pragma once

#include <optional>
#include <string>

#include "piston/model.hpp"

namespace piston::cli {

struct GlobalOptions {
  std::string out_dir = ".";
  int jobs = 0;  // 0: hardware concurrency
};

/// Scenario execution: emits <scenario>.csv (and optionally .svg); engine
/// `both` adds *_analytic / *_oracle / residual_* columns.
void cmd_run(const std::string& config_path, std::optional<Engine> engine_override,
             bool emit_svg, const std::string& dump_state_path, const GlobalOptions& opts);

/// Parameter sweep over theta | mean_n | g | n_th with a scalar summary per
/// value; values_spec is V0:V1:N[:log].
void cmd_sweep(const std::string& config_path, const std::string& axis,
               const std::string& values_spec, const std::string& summary,
               const GlobalOptions& opts);

/// Named end-to-end scenarios: fig2, fig4, hom, mu-eta, backaction.
void cmd_preset(const std::string& name, const GlobalOptions& opts);

/// Cross-engine validation suite; writes validation_report.md. Returns true
/// when every check passed. perturb_c is a test hook biasing the closed-form
/// c(t) inside the response comparison.
bool cmd_validate(const GlobalOptions& opts, double perturb_c);

}  // namespace piston::cli
