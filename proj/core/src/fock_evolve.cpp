#include "piston/fock.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fock_internal.hpp"

namespace piston::fock {

namespace {

double nrm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

// One Lanczos Krylov space of H from start vector v (unit norm), with full
// reorthogonalization. Returns the effective size (happy breakdown shrinks it).
struct Krylov {
  std::vector<std::vector<cplx>> basis;  // m vectors spanning the subspace
  std::vector<double> alpha;
  std::vector<double> beta;   // beta[j] couples j and j+1 inside the subspace
  double beta_res = 0.0;      // coupling to the first discarded direction
  bool exhausted = false;     // invariant subspace found, propagation exact
};

Krylov build_krylov(const SparseOperator& H, std::span<const cplx> v, std::size_t m_max) {
  Krylov k;
  const std::size_t n = v.size();
  k.basis.emplace_back(v.begin(), v.end());
  std::vector<cplx> w(n);
  double scale = 1.0;
  for (std::size_t j = 0; j < m_max; ++j) {
    H.apply(k.basis[j], w);
    // alpha_j = Re <v_j, w>; imaginary part vanishes for hermitian H
    cplx dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += std::conj(k.basis[j][i]) * w[i];
    k.alpha.push_back(dot.real());
    for (std::size_t i = 0; i < n; ++i) w[i] -= k.alpha[j] * k.basis[j][i];
    if (j > 0)
      for (std::size_t i = 0; i < n; ++i) w[i] -= k.beta[j - 1] * k.basis[j - 1][i];
    // full reorthogonalization pass
    for (const auto& q : k.basis) {
      cplx overlap = 0.0;
      for (std::size_t i = 0; i < n; ++i) overlap += std::conj(q[i]) * w[i];
      for (std::size_t i = 0; i < n; ++i) w[i] -= overlap * q[i];
    }
    scale = std::max({scale, std::abs(k.alpha[j]),
                      k.beta.empty() ? 0.0 : std::abs(k.beta.back())});
    const double b = nrm2(w);
    if (b <= 1e-14 * scale || k.basis.size() == n) {
      k.exhausted = true;
      return k;
    }
    if (j + 1 == m_max) {
      k.beta_res = b;  // residual direction, enters only the error estimate
      break;
    }
    k.beta.push_back(b);
    auto& next = k.basis.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / b;
  }
  return k;
}

}  // namespace

void krylov_propagate(const SparseOperator& H, std::vector<cplx>& v, double t, double tol) {
  if (t == 0.0 || v.empty()) return;
  const double v_norm = nrm2(v);
  if (v_norm == 0.0) return;

  const double total = std::abs(t);
  const double dir = t > 0.0 ? 1.0 : -1.0;
  double remaining = total;
  double dt = total;
  int guard = 0;

  double last_err = 0.0;
  while (remaining > 0.0) {
    if (++guard > 10000)
      throw std::runtime_error("krylov_propagate: stalled, achieved residual " +
                               std::to_string(last_err) + " at dt " + std::to_string(dt));

    const std::size_t m_max = std::min<std::size_t>(v.size(), 30);
    std::vector<cplx> unit(v.size());
    const double norm_in = nrm2(v);
    for (std::size_t i = 0; i < v.size(); ++i) unit[i] = v[i] / norm_in;
    Krylov k = build_krylov(H, unit, m_max);
    const std::size_t m = k.alpha.size();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = k.alpha[j];
      if (j + 1 < m) {
        T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j + 1)) = k.beta[j];
        T(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(j)) = k.beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const auto& U = es.eigenvectors();
    const auto& lam = es.eigenvalues();
    const Eigen::VectorXd e1 = U.row(0).transpose();

    dt = std::min(dt, remaining);
    // the estimator bottoms out at round-off; below that level shrinking dt
    // cannot reduce it further and the substep must be accepted
    const double round_off = 64.0 * std::numeric_limits<double>::epsilon();
    for (int shrink = 0;; ++shrink) {
      Eigen::VectorXcd w(static_cast<Eigen::Index>(m));
      for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i)
        w(i) = std::exp(cplx(0.0, -dir * dt * lam(i))) * e1(i);
      const Eigen::VectorXcd y = U * w;

      // local truncation estimate: weight leaking into the residual direction
      const double err =
          k.exhausted ? 0.0
                      : k.beta_res * std::abs(y(static_cast<Eigen::Index>(m) - 1));
      last_err = err;
      if (!std::isfinite(err))
        throw std::runtime_error("krylov_propagate: non-finite error estimate");
      const double budget = tol * (dt / total);
      if (err <= budget || err <= round_off) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          cplx acc = 0.0;
          for (std::size_t j = 0; j < m; ++j)
            acc += y(static_cast<Eigen::Index>(j)) * k.basis[j][i];
          v[i] = norm_in * acc;
        }
        remaining -= dt;
        dt *= 1.4;  // try growing the next substep
        break;
      }
      if (shrink > 120)
        throw std::runtime_error("krylov_propagate: no convergence, achieved residual " +
                                 std::to_string(err) + " at dt " + std::to_string(dt));
      dt *= std::max(0.2, 0.7 * std::pow(budget / err, 1.0 / static_cast<double>(m)));
    }
  }
}

void evolve(TruncatedState& state, const SparseOperator& hamiltonian, double t, double tol) {
  if (!hamiltonian.hermitian)
    throw std::invalid_argument("evolve: Hamiltonian must be flagged hermitian");
  if (tol < 1e-12 * (1.0 - 1e-9))
    throw std::invalid_argument("evolve: tol must be >= 1e-12");
  for (auto& b : state.branches) {
    if (b.amplitudes.size() != hamiltonian.dim)
      throw std::invalid_argument("evolve: state/Hamiltonian dimension mismatch");
    krylov_propagate(hamiltonian, b.amplitudes, t, tol);
  }
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

double branch_expectation(const Basis& basis, const std::vector<cplx>& v,
                          const std::string& name, const SystemParams& params) {
  const double x_zpf = params.x_zpf();
  if (name == "n_l" || name == "n_r" || name == "n_total" || name == "nl_nr" ||
      name == "h_m") {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double p = std::norm(v[i]);
      if (p == 0.0) continue;
      const Occ occ = basis.occupations(i);
      const double nl = occ[kLV] + occ[kLH];
      const double nr = occ[kRV] + occ[kRH];
      if (name == "n_l") acc += p * nl;
      else if (name == "n_r") acc += p * nr;
      else if (name == "n_total") acc += p * (nl + nr);
      else if (name == "nl_nr") acc += p * nl * nr;
      else acc += p * params.omega_m * occ[kM];
    }
    return acc;
  }
  if (name == "x_m" || name == "p_m" || name == "dn_xm") {
    // all three reduce to sums over phonon-lowering pairs <i(m)| . |i(m-1)>
    cplx m_avg = 0.0;       // <M>
    cplx dn_m_avg = 0.0;    // <dN M>
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0.0) continue;
      const Occ occ = basis.occupations(i);
      if (occ[kM] == 0) continue;
      Occ lower = occ;
      lower[kM] -= 1;
      const auto j = basis.index_of(lower);
      const cplx pair = std::conj(v[static_cast<std::size_t>(j)]) * v[i] *
                        std::sqrt(static_cast<double>(occ[kM]));
      m_avg += pair;
      dn_m_avg += pair * static_cast<double>(occ[kLV] + occ[kLH] - occ[kRV] - occ[kRH]);
    }
    if (name == "x_m") return 2.0 * x_zpf * m_avg.real();
    if (name == "p_m") return 2.0 * (0.5 / x_zpf) * m_avg.imag();
    // dN and X_M commute, so the symmetrized product is the plain one
    return 2.0 * x_zpf * dn_m_avg.real();
  }
  throw std::invalid_argument("unknown observable '" + name + "'");
}

double expectation(const TruncatedState& state, const std::string& observable,
                   const SystemParams& params) {
  double acc = 0.0;
  for (const auto& b : state.branches)
    acc += b.weight * branch_expectation(state.basis, b.amplitudes, observable, params);
  return acc;
}

}  // namespace piston::fock
