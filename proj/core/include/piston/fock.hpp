// fock.hpp — exact closed-system propagation of the full Hamiltonian on a
// truncated occupation basis: the brute-force ground truth for the
// first-order analytic results.
//
// Mode order is fixed as (L_V, L_H, R_V, R_H, M); basis indexing is
// row-major over that order with the phonon index fastest. Truncation is
// hard: creation past a cutoff annihilates the state.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "piston/model.hpp"

namespace piston::fock {

using cplx = std::complex<double>;

/// Raised when a requested basis would exceed the configured state cap.
class DimensionCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the configured cutoffs cannot hold a factor at tail < 1e-8.
class CutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum Mode { kLV = 0, kLH = 1, kRV = 2, kRH = 3, kM = 4 };

struct ModeLayout {
  int photon_cutoff = 1;  // max occupation per photonic mode, >= 1
  int phonon_cutoff = 1;  // max phonon occupation, >= 1

  std::size_t dimension() const {
    const std::size_t p = static_cast<std::size_t>(photon_cutoff) + 1;
    return p * p * p * p * (static_cast<std::size_t>(phonon_cutoff) + 1);
  }
};

using Occ = std::array<int, 5>;

/// Occupation basis over the five modes: either the full product space of a
/// ModeLayout or its fixed total-photon-number sector (the Hamiltonian
/// conserves N_total, so mixture branches are propagated sector-wise).
class Basis {
 public:
  Basis() = default;  // empty basis, dimension 0
  static Basis product(const ModeLayout& layout);
  static Basis photon_sector(const ModeLayout& layout, int total_photons);

  std::size_t dimension() const { return dim_; }
  const ModeLayout& layout() const { return layout_; }
  std::optional<int> sector() const { return sector_; }

  Occ occupations(std::size_t index) const;
  /// Index of an occupation tuple, or -1 when it lies outside the basis.
  std::ptrdiff_t index_of(const Occ& occ) const;

 private:
  ModeLayout layout_;
  std::optional<int> sector_;
  std::size_t dim_ = 0;
  // sector mode: photon 4-tuples in row-major order and their ranks
  std::vector<std::array<int, 4>> photon_states_;
  std::vector<std::int32_t> photon_rank_;  // packed tuple -> slot, -1 outside
  std::size_t pack(int a, int b, int c, int d) const;
};

/// Compressed-sparse-row operator on a Basis-sized space.
struct SparseOperator {
  std::size_t dim = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<cplx> val;
  bool hermitian = false;

  std::size_t nonzeros() const { return col.size(); }
  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  cplx entry(std::size_t r, std::size_t c) const;
  /// Spot-checks conjugate symmetry on `samples` random stored entries.
  bool hermitian_spot_check(std::uint64_t seed, int samples = 1000) const;
};

/// H = H_BS + H_I + H_C + H_M on the full product basis of `layout`.
SparseOperator build_hamiltonian(const SystemParams& params, const ModeLayout& layout,
                                 std::size_t dimension_cap = 2'000'000);

/// Same Hamiltonian restricted to an arbitrary basis (sector or product).
SparseOperator build_hamiltonian_on(const Basis& basis, const SystemParams& params);

struct StateBranch {
  double weight = 1.0;
  std::vector<cplx> amplitudes;
};

/// State vector (or deterministic mixture of them) over an occupation basis.
/// Invariants: each branch normalized to 1 +- 1e-10, weights sum to 1 +- 1e-10.
struct TruncatedState {
  Basis basis;
  std::vector<StateBranch> branches;

  bool is_mixture() const { return branches.size() > 1; }
  double norm_error() const;
};

/// Deterministic number-distribution weights up to `cutoff` (inclusive),
/// not renormalized; Fock is a delta, Coherent is Poisson (phase-averaged
/// gas), Thermal is Bose-Einstein.
std::vector<double> number_weights(const GasSpec& gas, int cutoff);
std::vector<double> thermal_weights(double n_bar, int cutoff);
/// Smallest cutoffs with tail mass < tail (CutoffError past hard_max).
int gas_cutoff_for_tail(const GasSpec& gas, double tail, int hard_max = 4096);
int thermal_cutoff_for_tail(double n_bar, double tail, int hard_max = 65536);

/// Product state of the two gases and a thermal membrane on the product
/// basis of `layout`. Gas/membrane number distributions are truncated
/// deterministic mixtures; every factor must fit with tail mass < 1e-8 at
/// the layout cutoffs (CutoffError otherwise). The right gas populates the
/// rotated mode cos(theta) R_V^+ + sin(theta) R_H^+.
TruncatedState prepare_state(const GasSpec& left, const GasSpec& right,
                             const MembraneSpec& membrane, const ModeLayout& layout,
                             std::size_t dimension_cap = 2'000'000);

/// Applies exp(-i H t) to every branch with a Lanczos/Krylov propagator at
/// per-step error control <= tol (tol >= 1e-12).
void evolve(TruncatedState& state, const SparseOperator& hamiltonian, double t,
            double tol = 1e-12);

/// Mixture-weighted real expectation of a named observable:
/// h_m, n_l, n_r, nl_nr, dn_xm (symmetrized), x_m, p_m, n_total.
double expectation(const TruncatedState& state, const std::string& observable,
                   const SystemParams& params);

struct OracleOptions {
  int photon_cutoff = 0;   // 0: smallest cutoff with factor tail < 1e-8
  int phonon_cutoff = 0;   // 0: auto (8 (n_th+1), doubled until stable)
  std::size_t dimension_cap = 2'000'000;
  double tol = 1e-12;
  int jobs = 0;            // 0: hardware concurrency
  double joint_tail = 1e-8;  // discarded joint mixture weight, renormalized
};

struct OracleSeries {
  std::vector<double> time;
  std::map<std::string, std::vector<double>> series;  // all observables
  int phonon_cutoff_used = 0;
  int photon_cutoff_used = 0;
  std::size_t branch_count = 0;
  std::size_t max_branch_dimension = 0;
};

/// Full oracle trajectory on the scenario's time grid: every direct
/// observable plus delta_h_m = <H_M(t)> - <H_M(0)>, g2_lr and h_total.
/// Closed-system only (kappa = kappa_m = 0). Mixture branches run on
/// conserved-N_total sector bases, in parallel across branches.
OracleSeries oracle_run(const ValidatedScenario& scenario,
                        const OracleOptions& options = {});

// Binary state dump: header (magic, mode order, cutoffs, sector, time),
// then per branch the weight and a little-endian complex64 amplitude array.
void write_state(const std::string& path, const TruncatedState& state, double time);
struct LoadedState {
  TruncatedState state;
  double time = 0.0;
};
LoadedState read_state(const std::string& path);

}  // namespace piston::fock
