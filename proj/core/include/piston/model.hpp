// model.hpp — physical parameter sets, initial-condition specs and the
// scenario configuration shared by the analytic and Fock-space engines.
//
// Unit convention: hbar = 1, every rate is an angular frequency in 1/s,
// energies are reported in the same 1/s units. The membrane mass enters
// only through g^2/m = 2 omega_m (g x_zpf)^2, so its numeric value is kept
// exactly as configured.

#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace piston {

/// Raised for malformed configuration files or invalid scenarios.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical constants of the cavity + membrane system.
struct SystemParams {
  double g = 0.0;        // optomechanical coupling, 1/(s * length)
  double omega = 0.0;    // cavity eigenfrequency, 1/s
  double omega_m = 0.0;  // membrane eigenfrequency, 1/s
  double lambda = 0.0;   // intercavity tunnelling rate, 1/s
  double mass = 0.0;     // membrane mass, kg
  double kappa = 0.0;    // cavity damping rate, 1/s
  double kappa_m = 0.0;  // membrane damping rate, 1/s

  // Zero-point uncertainty, recomputed so it can never go stale.
  double x_zpf() const { return 1.0 / std::sqrt(2.0 * mass * omega_m); }
  double g_x_zpf() const { return g * x_zpf(); }
};

/// The experimental parameter set of the headline energy-transfer scenario.
SystemParams paper_params();

/// Per-invariant violation messages; empty when the params are usable.
std::vector<std::string> system_errors(const SystemParams& p);

enum class GasFamily { Fock, Coherent, Thermal };

const char* to_string(GasFamily family);
GasFamily gas_family_from_string(const std::string& name);

/// One half-cavity photon gas: a number-statistics family with its mean and
/// the polarization angle theta. The left gas is fixed vertical (theta = 0);
/// distinguishability enters only through the right gas's theta.
struct GasSpec {
  GasFamily family = GasFamily::Fock;
  double mean = 0.0;   // photon number n for Fock (integral), mean otherwise
  double theta = 0.0;  // polarization angle in [0, pi/2], radians

  static GasSpec fock(int n, double theta = 0.0);
  static GasSpec coherent(double mean, double theta = 0.0);
  static GasSpec thermal(double mean, double theta = 0.0);

  bool is_vacuum() const { return mean <= 0.0; }
};

std::vector<std::string> gas_errors(const GasSpec& g, const std::string& label);

/// Membrane initial state: thermal with mean occupancy n_th
/// (so <X_M(0)> = <P_M(0)> = 0 by construction).
struct MembraneSpec {
  double n_th = 0.0;
};

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  int n_steps = 0;  // number of samples, >= 2, endpoints included

  std::vector<double> times() const;
};

enum class Engine { Analytic, Oracle, Both };

const char* to_string(Engine engine);
Engine engine_from_string(const std::string& name);

/// Canonical observable names understood by both engines.
/// h_m, n_l, n_r, nl_nr, x_m, p_m, n_total are direct expectations;
/// delta_h_m, g2_lr, dn_xm are the derived series of the runs.
bool is_known_observable(const std::string& name);
const std::vector<std::string>& all_observables();

struct ScenarioConfig {
  SystemParams params;
  GasSpec left;
  GasSpec right;
  MembraneSpec membrane;
  TimeGrid grid;
  Engine engine = Engine::Analytic;
  std::vector<std::string> outputs;  // defaults to {delta_h_m, g2_lr, dn_xm}

  // Oracle knobs. phonon_cutoff <= 0 means automatic selection.
  int phonon_cutoff = 0;
  std::size_t dimension_cap = 2'000'000;
};

/// All invariant violations of the scenario (empty means valid).
std::vector<std::string> validate_errors(const ScenarioConfig& config);

/// A ScenarioConfig that passed validation; the only way to obtain one is
/// through validate(), so engine entry points can rely on the invariants.
class ValidatedScenario {
 public:
  const ScenarioConfig& config() const { return config_; }
  const ScenarioConfig* operator->() const { return &config_; }

 private:
  friend ValidatedScenario validate(const ScenarioConfig&);
  explicit ValidatedScenario(ScenarioConfig c) : config_(std::move(c)) {}
  ScenarioConfig config_;
};

/// Throws ConfigError listing every violated invariant.
ValidatedScenario validate(const ScenarioConfig& config);

// Flat config file format: [section] headers (system, left_gas, right_gas,
// membrane, run), key = value lines, '#' comments. Unknown keys are a hard
// error. parse/serialize round-trip exactly.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_string(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& config);

/// FNV-1a over the canonical serialization; stable across runs and builds.
std::uint64_t scenario_hash(const ScenarioConfig& config);

}  // namespace piston
