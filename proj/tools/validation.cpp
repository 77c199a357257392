#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "piston/dynamics.hpp"
#include "piston/fock.hpp"
#include "piston/response.hpp"
#include "piston/timeseries.hpp"

namespace piston::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  std::string name;
  bool pass = false;
  double achieved = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

SystemParams desk(double lambda, double kappa, double kappa_m, double g = 1.0) {
  SystemParams p;
  p.omega_m = 1.0;
  p.omega = 5.0;
  p.lambda = lambda;
  p.kappa = kappa;
  p.kappa_m = kappa_m;
  p.mass = 0.5;
  p.g = g;
  return p;
}

double sup_rel(const std::vector<double>& ref, const std::vector<double>& got) {
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    scale = std::max(scale, std::abs(ref[i]));
    diff = std::max(diff, std::abs(ref[i] - got[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

// ---- response closed form vs numeric oracle -------------------------------

Check check_response(double perturb_c) {
  Check c{"oscillator-response closed form vs numeric ODE", false, 0.0, 1e-8, ""};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<SystemParams> sample;
  for (int i = 0; i < 16; ++i) {
    const double lambda = std::pow(10.0, -1.0 + 3.0 * uni(rng));
    const double kappa = uni(rng) < 0.25 ? 0.0 : std::pow(10.0, -3.0 + 4.0 * uni(rng));
    const double kappa_m = uni(rng) < 0.25 ? 0.0 : std::pow(10.0, -4.0 + 3.0 * uni(rng));
    sample.push_back(desk(lambda, kappa, kappa_m));
  }
  sample.push_back(desk(1.0, 0.0, 0.0));
  sample.push_back(desk(1.0 + 1e-9, 0.0, 0.0));
  sample.push_back(desk(1.0 + 1e-5, 0.0, 0.0));
  sample.push_back(desk(10.0, 0.0, 0.0));

  double worst = 0.0;
  for (const auto& p : sample) {
    std::vector<double> ts;
    for (int i = 1; i <= 120; ++i) ts.push_back(10.0 * 2.0 * kPi / p.omega_m * i / 120.0);
    const auto numeric = response_numeric(p, ForcingSpec::from(p), ts);
    std::vector<double> ca, cn, da, dn;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto rc = response_closed_form(p, ts[i]);
      ca.push_back(rc.c + perturb_c);
      da.push_back(rc.d);
      cn.push_back(numeric[i].c);
      dn.push_back(numeric[i].d);
    }
    worst = std::max(worst, std::max(sup_rel(cn, ca), sup_rel(dn, da)));
  }
  c.achieved = worst;
  c.pass = worst <= c.tolerance;
  c.detail = "20-point parameter sample incl. kappa = 0 and near-resonance";
  return c;
}

// ---- Eq-level consistency of the correlation forms ------------------------

Check check_g2_quadrature() {
  Check c{"time average of instantaneous g2 vs closed form", false, 0.0, 1e-8, ""};
  double worst = 0.0;
  const int n = 4096;
  for (GasFamily family : {GasFamily::Fock, GasFamily::Coherent, GasFamily::Thermal})
    for (double theta : {0.0, kPi / 4, kPi / 2}) {
      double acc = g2_instantaneous(family, 1.0, theta, 1.0, 0.0).g2_lr +
                   g2_instantaneous(family, 1.0, theta, 1.0, 2.0 * kPi).g2_lr;
      for (int i = 1; i < n; ++i)
        acc += g2_instantaneous(family, 1.0, theta, 1.0, 2.0 * kPi * i / n).g2_lr *
               (i % 2 ? 4.0 : 2.0);
      const double avg = acc / (3.0 * n);
      worst = std::max(worst, std::abs(avg - g2_time_average(family, 1.0, theta)));
    }
  c.achieved = worst;
  c.pass = worst <= c.tolerance;
  c.detail = "Simpson quadrature, 3 families x 3 angles";
  return c;
}

// ---- oracle cross checks ---------------------------------------------------

struct OracleCase {
  ScenarioConfig config;
  fock::OracleSeries run;
};

OracleCase run_case(GasFamily family, double mean, double theta, double g_over_lambda,
                    int jobs) {
  ScenarioConfig c;
  c.params = desk(10.0, 0.0, 0.0, g_over_lambda * 10.0);
  c.left = GasSpec{family, mean, 0.0};
  c.right = GasSpec{family, mean, theta};
  c.grid = {0.0, 6.0 * kPi / c.params.lambda, 61};
  c.engine = Engine::Oracle;
  fock::OracleOptions opts;
  opts.jobs = jobs;
  return {c, fock::oracle_run(validate(c), opts)};
}

Check check_oracle_vs_analytic(std::vector<OracleCase>& fock_cases, int jobs) {
  Check c{"oracle vs analytic dH_M, g2, <dN X_M> at g x_zpf/lambda = 1e-3", false, 0.0,
          0.01, ""};
  double worst = 0.0;
  for (GasFamily family : {GasFamily::Fock, GasFamily::Coherent})
    for (double theta : {0.0, kPi / 4, kPi / 2}) {
      const double mean = family == GasFamily::Fock ? 1.0 : 0.5;
      OracleCase oc = run_case(family, mean, theta, 1e-3, jobs);
      const auto& cfg = oc.config;
      std::vector<double> dh_a, g2_a, dnx_a;
      for (double t : oc.run.time) {
        dh_a.push_back(energy_transfer(cfg.params, cfg.left, cfg.right, t));
        g2_a.push_back(
            g2_instantaneous(family, mean, theta, cfg.params.lambda, t).g2_lr);
        dnx_a.push_back(cross_correlation(cfg.params, cfg.left, cfg.right, t));
      }
      worst = std::max(worst, sup_rel(oc.run.series.at("delta_h_m"), dh_a));
      worst = std::max(worst, sup_rel(oc.run.series.at("g2_lr"), g2_a));
      worst = std::max(worst, sup_rel(oc.run.series.at("dn_xm"), dnx_a));
      if (family == GasFamily::Fock && theta == 0.0) fock_cases.push_back(std::move(oc));
    }
  c.achieved = worst;
  c.pass = worst <= c.tolerance;
  c.detail = "Fock(1)^2 and Coherent(0.5)^2, theta in {0, pi/4, pi/2}";
  return c;
}

Check check_hom(int jobs) {
  Check c{"exact two-photon g2 zero at lambda t = pi/2", false, 0.0, 1e-9, ""};
  ScenarioConfig cfg;
  cfg.params = desk(1.0, 0.0, 0.0, 0.0);
  cfg.left = GasSpec::fock(1);
  cfg.right = GasSpec::fock(1, 0.0);
  cfg.grid = {0.0, kPi / 2.0, 5};
  cfg.engine = Engine::Oracle;
  cfg.phonon_cutoff = 2;
  fock::OracleOptions opts;
  opts.jobs = jobs;
  const auto run = fock::oracle_run(validate(cfg), opts);
  c.achieved = std::abs(run.series.at("g2_lr").back());
  c.pass = c.achieved <= c.tolerance;
  return c;
}

Check check_conservation(const std::vector<OracleCase>& cases) {
  Check c{"mirror symmetry and conservation laws on oracle trajectories", false, 0.0, 1e-9,
          ""};
  double worst = 0.0;
  for (const auto& oc : cases) {
    const auto& n = oc.run.series.at("n_total");
    const auto& h = oc.run.series.at("h_total");
    for (std::size_t i = 0; i < n.size(); ++i) {
      worst = std::max(worst, std::abs(oc.run.series.at("x_m")[i]));
      worst = std::max(worst, std::abs(n[i] - n[0]) / std::abs(n[0]));
      worst = std::max(worst, std::abs(h[i] - h[0]) / std::abs(h[0]));
    }
  }
  c.achieved = worst;
  c.pass = worst <= c.tolerance;
  c.detail = "<X_M> absolute; <N>, <H> relative drift";
  return c;
}

Check check_perturbation_order(const std::vector<OracleCase>& cases, int jobs) {
  Check c{"halving g cuts the oracle-analytic residual by >= 8", false, 0.0, 8.0, ""};
  const auto& full = cases.front();
  OracleCase half = run_case(GasFamily::Fock, 1.0, 0.0, 0.5e-3, jobs);
  auto residual = [](const OracleCase& oc) {
    double acc = 0.0;
    for (std::size_t i = 0; i < oc.run.time.size(); ++i) {
      const double a = energy_transfer(oc.config.params, oc.config.left, oc.config.right,
                                       oc.run.time[i]);
      const double diff = oc.run.series.at("delta_h_m")[i] - a;
      acc += diff * diff;
    }
    return std::sqrt(acc / static_cast<double>(oc.run.time.size()));
  };
  const double ratio = residual(full) / residual(half);
  c.achieved = ratio;
  c.pass = ratio >= 8.0;
  c.detail = "residual rms ratio (expected ~16: the correction is O(g^4))";
  return c;
}

Check check_envelope_calibration() {
  Check c{"long-time envelope averages vs reference mu, eta", false, 0.0, 1e-6, ""};
  const SystemParams p = desk(7.3, 0.31, 0.0);
  const LongTimeCoefficients lt = long_time_coefficients(p);
  const double t0 = 20.0 / p.kappa;
  const double window = 200.0 * 2.0 * kPi / p.omega_m;
  double ubar = 0.0, vbar = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const EnergyEnvelope e = energy_envelope(p, t0 + window * (i + 0.5) / n);
    ubar += e.u;
    vbar += e.v;
  }
  ubar /= n;
  vbar /= n;
  const double dev =
      std::max(std::abs(ubar / (lt.mu / 4.0) - 1.0), std::abs(vbar / (lt.eta / 2.0) - 1.0));
  c.achieved = dev;
  c.pass = dev <= c.tolerance;
  c.detail = "<u>_t = mu/4 and <v>_t = eta/2: the reference closed forms carry exact "
             "extra factors 4 and 2 over the envelope averages (oracle-pinned)";
  return c;
}

Check check_plateau() {
  Check c{"running average of dH_M on the plateau", false, 0.0, 0.01, ""};
  const SystemParams p = paper_params();
  const GasSpec left = GasSpec::coherent(6e6);
  const GasSpec right = GasSpec::coherent(6e6, 0.0);
  const LongTimeCoefficients lt = long_time_coefficients(p);
  const JointMoments jm = joint_moments(left, right);
  const double expected =
      0.5 * (lt.mu / 4.0) * jm.delta_n_sq + 0.5 * (lt.eta / 2.0) * jm.delta_k_sq;
  double avg = 0.0;
  const int n = 400;
  for (int i = 0; i < n; ++i)
    avg += energy_transfer(p, left, right, 10.0 / p.kappa + (90.0 / p.kappa) * (i + 0.5) / n);
  avg /= n;
  c.achieved = std::abs(avg / expected - 1.0);
  c.pass = c.achieved <= c.tolerance;
  c.detail = "t in [10/kappa, 100/kappa] vs the calibrated long-time value (" + sci(avg) +
             " 1/s, i.e. eta/2 |alpha|^4 for the 6e6-photon pulse)";
  return c;
}

Check check_paper_values() {
  Check c{"eta and mu against the reference experimental values", false, 0.0, 0.15, ""};
  const LongTimeCoefficients lt = long_time_coefficients(paper_params());
  const double eta_dev = std::abs(lt.eta / 1.2e-8 - 1.0);
  const double mu_factor = lt.mu / 1.3e-18;
  c.achieved = eta_dev;
  c.pass = eta_dev <= 0.15 && mu_factor < 3.0 && mu_factor > 1.0 / 3.0;
  c.detail = "eta = " + sci(lt.eta) + " vs 1.2e-8 (dev " + sci(eta_dev) + "); mu = " +
             sci(lt.mu) + " sits a factor " + sci(mu_factor) +
             " above the reference 1.3e-18 (unit-convention discrepancy, flagged)";
  return c;
}

Check check_scaling() {
  Check c{"quadratic vs linear photon-number scaling of the long-time transfer", false,
          0.0, 0.02, ""};
  const SystemParams p = paper_params();
  std::vector<double> means, indist_part, dist;
  for (int i = 0; i <= 8; ++i) {
    const double mean = 1e2 * std::pow(1e4, i / 8.0);
    means.push_back(mean);
    const double th0 =
        long_time_transfer(p, GasSpec::coherent(mean), GasSpec::coherent(mean, 0.0));
    const double th90 =
        long_time_transfer(p, GasSpec::coherent(mean), GasSpec::coherent(mean, kPi / 2));
    indist_part.push_back(th0 - th90);
    dist.push_back(th90);
  }
  const double s2 = loglog_slope(means, indist_part);
  const double s1 = loglog_slope(means, dist);
  c.achieved = std::max(std::abs(s2 - 2.0), std::abs(s1 - 1.0));
  c.pass = c.achieved <= c.tolerance;
  c.detail = "slopes " + sci(s2) + " (theta part) and " + sci(s1) + " (distinguishable)";
  return c;
}

Check check_branch_discontinuity() {
  Check c{"kappa = 0 branch discontinuity documented", true, 0.0, 0.0, ""};
  SystemParams p = desk(10.0, 0.0, 0.0);
  const LongTimeCoefficients lt0 = long_time_coefficients(p);
  p.kappa = 1e-9 * p.omega_m;
  const LongTimeCoefficients ltn = long_time_coefficients(p);
  c.achieved = lt0.eta / ltn.eta;
  c.detail = "eta(kappa=0)/eta(kappa->0+) = " + sci(c.achieved) +
             ", mu ratio = " + sci(lt0.mu / ltn.mu) +
             " at lambda = 10 omega_m (selected by exact kappa == 0, not a threshold)";
  return c;
}

}  // namespace

bool cmd_validate(const GlobalOptions& opts, double perturb_c) {
  std::vector<Check> checks;
  std::vector<OracleCase> fock_cases;
  checks.push_back(check_response(perturb_c));
  checks.push_back(check_g2_quadrature());
  checks.push_back(check_oracle_vs_analytic(fock_cases, opts.jobs));
  checks.push_back(check_hom(opts.jobs));
  checks.push_back(check_conservation(fock_cases));
  checks.push_back(check_perturbation_order(fock_cases, opts.jobs));
  checks.push_back(check_envelope_calibration());
  checks.push_back(check_plateau());
  checks.push_back(check_paper_values());
  checks.push_back(check_scaling());
  checks.push_back(check_branch_discontinuity());

  bool all_pass = true;
  std::ostringstream md;
  md << "# Validation report\n\n";
  if (perturb_c != 0.0)
    md << "**Test hook active:** closed-form c(t) biased by " << sci(perturb_c) << "\n\n";
  md << "| check | status | achieved | tolerance |\n";
  md << "|---|---|---|---|\n";
  for (const Check& c : checks) {
    all_pass = all_pass && c.pass;
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (achieved " << sci(c.achieved)
              << ", tolerance " << sci(c.tolerance) << ")\n";
    md << "| " << c.name << " | " << (c.pass ? "pass" : "FAIL") << " | " << sci(c.achieved)
       << " | " << sci(c.tolerance) << " |\n";
  }
  md << "\n## Notes\n\n";
  for (const Check& c : checks)
    if (!c.detail.empty()) md << "- **" << c.name << ":** " << c.detail << "\n";
  md << "- **Instantaneous g2 form:** shipped as (1 + cos^2(lambda t))/2 + "
        "(sin^2(lambda t)/2)(gamma - cos^2 theta). The exact two-photon evolution "
        "confirms its interference zero at lambda t = pi/2; the alternative "
        "(cos(lambda t) + 3)/4 leading term gives 1/4 there and is rejected. Both "
        "share the time average (gamma + 3 - cos^2 theta)/4.\n";
  md << "- **Coherent gases:** prepared as phase-averaged (Poisson-weighted) number "
        "mixtures. A same-phase pure coherent product instead gives <dK^2> = 2<N> "
        "with no quadratic enhancement; the phase-averaged form is the one all "
        "first-order formulas and the oracle agree on.\n";
  md << "- **Reference mu, eta:** the closed forms used by long_time_transfer carry "
        "exact factors 4 and 2 over the long-time averages of the oracle-confirmed "
        "envelopes u, v; both conventions are reported here, with the plateau "
        "checked against the calibrated values.\n";

  std::filesystem::create_directories(opts.out_dir);
  const auto path = std::filesystem::path(opts.out_dir) / "validation_report.md";
  std::ofstream out(path);
  out << md.str() << "\noverall: " << (all_pass ? "PASS" : "FAIL") << "\n";
  std::cout << "wrote " << path.string() << "\noverall: " << (all_pass ? "PASS" : "FAIL")
            << "\n";
  return all_pass;
}

}  // namespace piston::cli
