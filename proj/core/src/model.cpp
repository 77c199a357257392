#include "piston/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace piston {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

}  // namespace

SystemParams paper_params() {
  // omega_m = 350 kHz, omega = 20 THz, lambda = 34 GHz, kappa = 85 kHz,
  // kappa_m = 1 Hz, m = 45 ng, g x_zpf = 3.3 kHz; all read as angular
  // frequencies in 1/s.
  SystemParams p;
  p.omega_m = 3.5e5;
  p.omega = 2.0e13;
  p.lambda = 3.4e10;
  p.kappa = 8.5e4;
  p.kappa_m = 1.0;
  p.mass = 45e-12;
  p.g = 3.3e3 / p.x_zpf();
  return p;
}

std::vector<std::string> system_errors(const SystemParams& p) {
  std::vector<std::string> errs;
  if (!(p.omega_m > 0.0)) errs.push_back("system: omega_m must be > 0");
  if (!(p.lambda > 0.0)) errs.push_back("system: lambda must be > 0");
  if (!(p.mass > 0.0)) errs.push_back("system: mass must be > 0");
  if (!(p.kappa >= 0.0)) errs.push_back("system: kappa must be >= 0");
  if (!(p.kappa_m >= 0.0)) errs.push_back("system: kappa_m must be >= 0");
  if (!(p.omega >= 0.0)) errs.push_back("system: omega must be >= 0");
  if (p.mass > 0.0 && p.omega_m > 0.0 && !(p.g >= 0.0))
    errs.push_back("system: g must be >= 0");
  return errs;
}

const char* to_string(GasFamily family) {
  switch (family) {
    case GasFamily::Fock: return "fock";
    case GasFamily::Coherent: return "coherent";
    case GasFamily::Thermal: return "thermal";
  }
  return "?";
}

GasFamily gas_family_from_string(const std::string& name) {
  if (name == "fock") return GasFamily::Fock;
  if (name == "coherent") return GasFamily::Coherent;
  if (name == "thermal") return GasFamily::Thermal;
  throw ConfigError("unknown gas family '" + name + "' (fock|coherent|thermal)");
}

GasSpec GasSpec::fock(int n, double theta) {
  return GasSpec{GasFamily::Fock, static_cast<double>(n), theta};
}
GasSpec GasSpec::coherent(double mean, double theta) {
  return GasSpec{GasFamily::Coherent, mean, theta};
}
GasSpec GasSpec::thermal(double mean, double theta) {
  return GasSpec{GasFamily::Thermal, mean, theta};
}

std::vector<std::string> gas_errors(const GasSpec& g, const std::string& label) {
  std::vector<std::string> errs;
  if (!(g.mean >= 0.0))
    errs.push_back(label + ": mean photon number must be >= 0");
  if (g.family == GasFamily::Fock && !near_integer(g.mean))
    errs.push_back(label + ": Fock occupation must be a nonnegative integer");
  if (!(g.theta >= 0.0 && g.theta <= kPi / 2 + 1e-12))
    errs.push_back(label + ": theta must lie in [0, pi/2]");
  return errs;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> ts(static_cast<std::size_t>(n_steps));
  const double dt = (t_end - t_start) / (n_steps - 1);
  for (int i = 0; i < n_steps; ++i) ts[static_cast<std::size_t>(i)] = t_start + dt * i;
  ts.back() = t_end;
  return ts;
}

const char* to_string(Engine engine) {
  switch (engine) {
    case Engine::Analytic: return "analytic";
    case Engine::Oracle: return "oracle";
    case Engine::Both: return "both";
  }
  return "?";
}

Engine engine_from_string(const std::string& name) {
  if (name == "analytic") return Engine::Analytic;
  if (name == "oracle") return Engine::Oracle;
  if (name == "both") return Engine::Both;
  throw ConfigError("unknown engine '" + name + "' (analytic|oracle|both)");
}

const std::vector<std::string>& all_observables() {
  static const std::vector<std::string> names = {
      "delta_h_m", "g2_lr", "dn_xm", "h_m", "n_l", "n_r",
      "nl_nr",     "x_m",   "p_m",   "n_total"};
  return names;
}

bool is_known_observable(const std::string& name) {
  const auto& names = all_observables();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<std::string> validate_errors(const ScenarioConfig& c) {
  std::vector<std::string> errs = system_errors(c.params);
  auto append = [&errs](std::vector<std::string> more) {
    errs.insert(errs.end(), more.begin(), more.end());
  };
  append(gas_errors(c.left, "left_gas"));
  append(gas_errors(c.right, "right_gas"));

  if (c.left.theta != 0.0)
    errs.push_back("left_gas: polarization is fixed vertical, theta must be 0");
  if (c.left.family != c.right.family)
    errs.push_back("gases: left and right must share the same statistics family");
  if (std::abs(c.left.mean - c.right.mean) > 1e-12 * std::max(1.0, c.left.mean))
    errs.push_back("gases: left and right must share the same mean photon number");

  if (!(c.membrane.n_th >= 0.0))
    errs.push_back("membrane: n_th must be >= 0");

  if (!(c.grid.t_start >= 0.0))
    errs.push_back("run: t_start must be >= 0");
  if (!(c.grid.t_end > c.grid.t_start))
    errs.push_back("run: t_end must be > t_start");
  if (c.grid.n_steps < 2)
    errs.push_back("run: n_steps must be >= 2");

  for (const auto& name : c.outputs)
    if (!is_known_observable(name))
      errs.push_back("run: unknown observable '" + name + "'");

  if ((c.engine == Engine::Oracle || c.engine == Engine::Both) &&
      (c.params.kappa != 0.0 || c.params.kappa_m != 0.0))
    errs.push_back("run: the Fock oracle is closed-system only (kappa = kappa_m = 0)");

  if (c.dimension_cap == 0)
    errs.push_back("run: dimension_cap must be positive");
  return errs;
}

ValidatedScenario validate(const ScenarioConfig& config) {
  auto errs = validate_errors(config);
  if (!errs.empty()) {
    std::string joined = "invalid scenario:";
    for (const auto& e : errs) joined += "\n  - " + e;
    throw ConfigError(joined);
  }
  ScenarioConfig normalized = config;
  if (normalized.outputs.empty())
    normalized.outputs = {"delta_h_m", "g2_lr", "dn_xm"};
  return ValidatedScenario(std::move(normalized));
}

// ---------------------------------------------------------------------------
// Config file parsing
// ---------------------------------------------------------------------------

namespace {

struct RawConfig {
  // section -> ordered key/value pairs
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse number '" + v + "'");
  }
}

RawConfig tokenize(std::istream& in) {
  RawConfig raw;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      raw.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    raw.sections[section].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return raw;
}

GasSpec parse_gas(const std::vector<std::pair<std::string, std::string>>& kvs,
                  const std::string& section) {
  GasSpec gas;
  bool have_family = false;
  for (const auto& [key, value] : kvs) {
    if (key == "family") {
      gas.family = gas_family_from_string(value);
      have_family = true;
    } else if (key == "mean" || key == "n") {
      gas.mean = parse_number(value, section + "." + key);
    } else if (key == "theta") {
      gas.theta = parse_number(value, section + ".theta");
    } else {
      throw ConfigError(section + ": unknown key '" + key + "'");
    }
  }
  if (!have_family) throw ConfigError(section + ": missing 'family'");
  return gas;
}

}  // namespace

ScenarioConfig parse_config(std::istream& in) {
  RawConfig raw = tokenize(in);
  for (const auto& [name, kvs] : raw.sections) {
    (void)kvs;
    if (name != "system" && name != "left_gas" && name != "right_gas" &&
        name != "membrane" && name != "run")
      throw ConfigError("unknown section [" + name + "]");
  }
  ScenarioConfig c;

  if (!raw.sections.count("system")) throw ConfigError("missing [system] section");
  double g_x_zpf = -1.0;
  bool have_g = false;
  for (const auto& [key, value] : raw.sections["system"]) {
    double v = parse_number(value, "system." + key);
    if (key == "omega_m") c.params.omega_m = v;
    else if (key == "omega") c.params.omega = v;
    else if (key == "lambda") c.params.lambda = v;
    else if (key == "kappa") c.params.kappa = v;
    else if (key == "kappa_m") c.params.kappa_m = v;
    else if (key == "mass") c.params.mass = v;
    else if (key == "g") { c.params.g = v; have_g = true; }
    else if (key == "g_x_zpf") g_x_zpf = v;
    else throw ConfigError("system: unknown key '" + key + "'");
  }
  if (g_x_zpf >= 0.0) {
    if (have_g) throw ConfigError("system: give either 'g' or 'g_x_zpf', not both");
    if (!(c.params.mass > 0.0 && c.params.omega_m > 0.0))
      throw ConfigError("system: g_x_zpf requires positive mass and omega_m");
    c.params.g = g_x_zpf / c.params.x_zpf();
  }

  if (!raw.sections.count("left_gas")) throw ConfigError("missing [left_gas] section");
  if (!raw.sections.count("right_gas")) throw ConfigError("missing [right_gas] section");
  c.left = parse_gas(raw.sections["left_gas"], "left_gas");
  c.right = parse_gas(raw.sections["right_gas"], "right_gas");

  if (raw.sections.count("membrane")) {
    for (const auto& [key, value] : raw.sections["membrane"]) {
      if (key == "n_th") c.membrane.n_th = parse_number(value, "membrane.n_th");
      else throw ConfigError("membrane: unknown key '" + key + "'");
    }
  }

  if (!raw.sections.count("run")) throw ConfigError("missing [run] section");
  for (const auto& [key, value] : raw.sections["run"]) {
    if (key == "t_start") c.grid.t_start = parse_number(value, "run.t_start");
    else if (key == "t_end") c.grid.t_end = parse_number(value, "run.t_end");
    else if (key == "n_steps") c.grid.n_steps = static_cast<int>(parse_number(value, "run.n_steps"));
    else if (key == "engine") c.engine = engine_from_string(value);
    else if (key == "outputs") {
      c.outputs.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) c.outputs.push_back(item);
      }
    } else if (key == "phonon_cutoff") {
      c.phonon_cutoff = static_cast<int>(parse_number(value, "run.phonon_cutoff"));
    } else if (key == "dimension_cap") {
      c.dimension_cap = static_cast<std::size_t>(parse_number(value, "run.dimension_cap"));
    } else {
      throw ConfigError("run: unknown key '" + key + "'");
    }
  }
  return c;
}

ScenarioConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[system]\n";
  out << "omega_m = " << format_double(c.params.omega_m) << "\n";
  out << "omega = " << format_double(c.params.omega) << "\n";
  out << "lambda = " << format_double(c.params.lambda) << "\n";
  out << "kappa = " << format_double(c.params.kappa) << "\n";
  out << "kappa_m = " << format_double(c.params.kappa_m) << "\n";
  out << "mass = " << format_double(c.params.mass) << "\n";
  out << "g = " << format_double(c.params.g) << "\n";
  auto gas = [&out](const char* name, const GasSpec& g) {
    out << "[" << name << "]\n";
    out << "family = " << to_string(g.family) << "\n";
    out << "mean = " << format_double(g.mean) << "\n";
    out << "theta = " << format_double(g.theta) << "\n";
  };
  gas("left_gas", c.left);
  gas("right_gas", c.right);
  out << "[membrane]\n";
  out << "n_th = " << format_double(c.membrane.n_th) << "\n";
  out << "[run]\n";
  out << "t_start = " << format_double(c.grid.t_start) << "\n";
  out << "t_end = " << format_double(c.grid.t_end) << "\n";
  out << "n_steps = " << c.grid.n_steps << "\n";
  out << "engine = " << to_string(c.engine) << "\n";
  if (!c.outputs.empty()) {
    out << "outputs = ";
    for (std::size_t i = 0; i < c.outputs.size(); ++i)
      out << (i ? ", " : "") << c.outputs[i];
    out << "\n";
  }
  if (c.phonon_cutoff > 0) out << "phonon_cutoff = " << c.phonon_cutoff << "\n";
  if (c.dimension_cap != 2'000'000)
    out << "dimension_cap = " << c.dimension_cap << "\n";
  return out.str();
}

std::uint64_t scenario_hash(const ScenarioConfig& config) {
  const std::string text = serialize_config(config);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace piston
