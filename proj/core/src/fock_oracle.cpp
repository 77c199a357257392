#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "fock_internal.hpp"
#include "piston/fock.hpp"

namespace piston::fock {

namespace {

constexpr double kFactorTail = 1e-8;

struct Branch {
  int n_left = 0;   // photons in L_V
  int n_right = 0;  // photons in the rotated right mode
  int q = 0;        // initial phonon occupation
  double weight = 0.0;
};

// direct observables evaluated on every branch at every grid point
const std::vector<std::string>& direct_observables() {
  static const std::vector<std::string> names = {
      "n_l", "n_r", "nl_nr", "h_m", "x_m", "p_m", "dn_xm", "n_total"};
  return names;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Branch> enumerate_branches(const ScenarioConfig& c, int photon_cutoff,
                                       int phonon_tail_cutoff, double joint_tail) {
  const auto wl = number_weights(c.left, photon_cutoff);
  const auto wr = number_weights(c.right, photon_cutoff);
  const auto wq = thermal_weights(c.membrane.n_th, phonon_tail_cutoff);

  std::vector<Branch> branches;
  for (int n = 0; n <= photon_cutoff; ++n) {
    if (wl[static_cast<std::size_t>(n)] == 0.0) continue;
    for (int m = 0; m <= photon_cutoff; ++m) {
      if (wr[static_cast<std::size_t>(m)] == 0.0) continue;
      for (int q = 0; q <= phonon_tail_cutoff; ++q) {
        const double w = wl[static_cast<std::size_t>(n)] * wr[static_cast<std::size_t>(m)] *
                         wq[static_cast<std::size_t>(q)];
        if (w > 0.0) branches.push_back({n, m, q, w});
      }
    }
  }
  std::sort(branches.begin(), branches.end(), [](const Branch& a, const Branch& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return std::tie(a.n_left, a.n_right, a.q) < std::tie(b.n_left, b.n_right, b.q);
  });
  double kept = 0.0;
  std::size_t count = 0;
  while (count < branches.size() && kept < 1.0 - joint_tail)
    kept += branches[count++].weight;
  branches.resize(count);
  for (auto& b : branches) b.weight /= kept;
  return branches;
}

std::vector<cplx> branch_vector(const Basis& basis, const Branch& br, double theta) {
  std::vector<cplx> v(basis.dimension(), 0.0);
  const int m = br.n_right;
  const double c = std::cos(theta), s = std::sin(theta);
  double binom = 1.0;
  for (int k = 0; k <= m; ++k) {
    const double amp = std::sqrt(binom) * std::pow(c, k) * std::pow(s, m - k);
    binom *= static_cast<double>(m - k) / (k + 1.0);
    if (amp == 0.0) continue;
    const auto idx = basis.index_of({br.n_left, 0, k, m - k, br.q});
    if (idx < 0)
      throw CutoffError("branch state outside the sector basis");
    v[static_cast<std::size_t>(idx)] = amp;
  }
  return v;
}

struct RunResult {
  // series[obs][time], already weight-summed over branches, plus h_total
  std::map<std::string, std::vector<double>> series;
  std::size_t max_branch_dimension = 0;
};

RunResult run_branches(const ScenarioConfig& c, const std::vector<Branch>& branches,
                       int phonon_cutoff, const std::vector<double>& times,
                       const OracleOptions& opts) {
  // sector bases and Hamiltonians are shared between equal-photon branches
  std::map<int, std::pair<Basis, SparseOperator>> sector_cache;
  std::size_t max_dim = 0;
  for (const auto& br : branches) {
    const int k = br.n_left + br.n_right;
    if (sector_cache.count(k)) continue;
    ModeLayout layout{std::max(k, 1), phonon_cutoff};
    Basis basis = Basis::photon_sector(layout, k);
    if (basis.dimension() > opts.dimension_cap)
      throw DimensionCapError("sector basis dimension " + std::to_string(basis.dimension()) +
                              " exceeds cap " + std::to_string(opts.dimension_cap));
    max_dim = std::max(max_dim, basis.dimension());
    SparseOperator H = build_hamiltonian_on(basis, c.params);
    sector_cache.emplace(k, std::make_pair(std::move(basis), std::move(H)));
  }

  const auto& names = direct_observables();
  const std::size_t n_obs = names.size();
  const std::size_t n_t = times.size();
  // per-branch rows: [time][obs] + h_total appended
  std::vector<std::vector<double>> rows(branches.size(),
                                        std::vector<double>(n_t * (n_obs + 1), 0.0));

  parallel_for(branches.size(), opts.jobs, [&](std::size_t bi) {
    const Branch& br = branches[bi];
    const auto& [basis, H] = sector_cache.at(br.n_left + br.n_right);
    std::vector<cplx> v = branch_vector(basis, br, c.right.theta);
    std::vector<cplx> hv(v.size());
    double prev_t = 0.0;
    for (std::size_t ti = 0; ti < n_t; ++ti) {
      const double dt = times[ti] - prev_t;
      if (dt != 0.0) krylov_propagate(H, v, dt, opts.tol);
      prev_t = times[ti];
      for (std::size_t oi = 0; oi < n_obs; ++oi)
        rows[bi][ti * (n_obs + 1) + oi] = branch_expectation(basis, v, names[oi], c.params);
      H.apply(v, hv);
      cplx e = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) e += std::conj(v[i]) * hv[i];
      rows[bi][ti * (n_obs + 1) + n_obs] = e.real();
    }
  });

  RunResult result;
  result.max_branch_dimension = max_dim;
  for (std::size_t oi = 0; oi < n_obs; ++oi)
    result.series[names[oi]] = std::vector<double>(n_t, 0.0);
  result.series["h_total"] = std::vector<double>(n_t, 0.0);
  for (std::size_t bi = 0; bi < branches.size(); ++bi)
    for (std::size_t ti = 0; ti < n_t; ++ti) {
      for (std::size_t oi = 0; oi < n_obs; ++oi)
        result.series[names[oi]][ti] += branches[bi].weight * rows[bi][ti * (n_obs + 1) + oi];
      result.series["h_total"][ti] += branches[bi].weight * rows[bi][ti * (n_obs + 1) + n_obs];
    }
  return result;
}

void add_derived_series(const ScenarioConfig& c, const std::vector<Branch>& branches,
                        RunResult& run) {
  const std::size_t n_t = run.series.at("h_m").size();
  // <H_M(0)> of the prepared mixture: phonons start in Fock |q>
  double hm0 = 0.0;
  for (const auto& br : branches) hm0 += br.weight * c.params.omega_m * br.q;
  auto& dh = run.series["delta_h_m"];
  dh.assign(n_t, 0.0);
  for (std::size_t ti = 0; ti < n_t; ++ti) dh[ti] = run.series.at("h_m")[ti] - hm0;

  auto& g2 = run.series["g2_lr"];
  g2.assign(n_t, 0.0);
  for (std::size_t ti = 0; ti < n_t; ++ti) {
    const double denom = run.series.at("n_l")[ti] * run.series.at("n_r")[ti];
    g2[ti] = denom > 0.0 ? run.series.at("nl_nr")[ti] / denom
                         : std::numeric_limits<double>::quiet_NaN();
  }
}

// Truncation-convergence comparison for the cutoff-doubling rule. Below the
// propagator's own error level a doubling run measures integrator noise, not
// truncation, so differences under an absolute floor tied to the problem's
// energy scale count as converged.
bool series_converged(const std::vector<double>& ref, const std::vector<double>& got,
                      double energy_scale, double tol) {
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (std::isnan(ref[i]) || std::isnan(got[i])) continue;
    scale = std::max(scale, std::abs(ref[i]));
    diff = std::max(diff, std::abs(ref[i] - got[i]));
  }
  const double floor = 100.0 * tol * std::max(1.0, energy_scale);
  return diff <= 1e-8 * scale + floor;
}

}  // namespace

OracleSeries oracle_run(const ValidatedScenario& scenario, const OracleOptions& options) {
  const ScenarioConfig& c = scenario.config();
  if (c.params.kappa != 0.0 || c.params.kappa_m != 0.0)
    throw std::invalid_argument(
        "oracle_run: the exact oracle is closed-system only (kappa = kappa_m = 0)");

  int photon_cutoff = options.photon_cutoff;
  if (photon_cutoff <= 0)
    photon_cutoff = std::max(gas_cutoff_for_tail(c.left, kFactorTail),
                             gas_cutoff_for_tail(c.right, kFactorTail));
  photon_cutoff = std::max(photon_cutoff, 1);
  {  // per-factor tail precondition at the chosen cutoffs
    auto check = [&](const std::vector<double>& w, const char* what) {
      double tail = 1.0;
      for (double x : w) tail -= x;
      if (!(tail < kFactorTail))
        throw CutoffError(std::string(what) + " tail mass " + std::to_string(tail) +
                          " at photon cutoff " + std::to_string(photon_cutoff));
    };
    check(number_weights(c.left, photon_cutoff), "left gas");
    check(number_weights(c.right, photon_cutoff), "right gas");
  }
  const int phonon_tail_cutoff = thermal_cutoff_for_tail(c.membrane.n_th, kFactorTail);

  const std::vector<Branch> branches =
      enumerate_branches(c, photon_cutoff, phonon_tail_cutoff, options.joint_tail);
  const std::vector<double> times = c.grid.times();

  auto finish = [&](RunResult run, int phonon_cutoff_used) {
    add_derived_series(c, branches, run);
    OracleSeries out;
    out.time = times;
    out.series = std::move(run.series);
    out.phonon_cutoff_used = phonon_cutoff_used;
    out.photon_cutoff_used = photon_cutoff;
    out.branch_count = branches.size();
    out.max_branch_dimension = run.max_branch_dimension;
    return out;
  };

  if (options.phonon_cutoff > 0) {
    if (options.phonon_cutoff < phonon_tail_cutoff)
      throw CutoffError("phonon cutoff " + std::to_string(options.phonon_cutoff) +
                        " cannot hold the thermal membrane at tail < 1e-8 (need >= " +
                        std::to_string(phonon_tail_cutoff) + ")");
    return finish(run_branches(c, branches, options.phonon_cutoff, times, options),
                  options.phonon_cutoff);
  }

  // automatic selection: start at 8 (n_th + 1), grow to hold the thermal
  // tail, then double until doubling moves no observable by >= 1e-8 relative
  int cutoff = 8 * (static_cast<int>(std::floor(c.membrane.n_th)) + 1);
  while (cutoff < phonon_tail_cutoff) cutoff *= 2;

  // coarse probe grid for the stability test
  std::vector<double> probe;
  const std::size_t stride = std::max<std::size_t>(1, (times.size() - 1) / 8);
  for (std::size_t i = 0; i < times.size(); i += stride) probe.push_back(times[i]);
  if (probe.back() != times.back()) probe.push_back(times.back());

  for (int attempt = 0; attempt < 6; ++attempt) {
    RunResult coarse = run_branches(c, branches, cutoff, probe, options);
    RunResult doubled = run_branches(c, branches, 2 * cutoff, probe, options);
    add_derived_series(c, branches, coarse);
    add_derived_series(c, branches, doubled);
    double energy_scale = 1.0;
    for (double h : doubled.series.at("h_total")) energy_scale = std::max(energy_scale, std::abs(h));
    bool stable = true;
    for (const auto& [name, series] : coarse.series)
      stable = stable &&
               series_converged(doubled.series.at(name), series, energy_scale, options.tol);
    if (stable)
      return finish(run_branches(c, branches, cutoff, times, options), cutoff);
    cutoff *= 2;
  }
  throw CutoffError("phonon cutoff did not stabilize after 6 doublings");
}

}  // namespace piston::fock
