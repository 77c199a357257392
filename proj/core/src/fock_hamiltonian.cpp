#include "piston/fock.hpp"

#include <algorithm>

namespace piston::fock {

namespace {

struct Entry {
  std::size_t col;
  double value;  // H is real in the occupation basis
};

}  // namespace

SparseOperator build_hamiltonian_on(const Basis& basis, const SystemParams& params) {
  const double x_zpf = params.x_zpf();
  const double half_lambda = 0.5 * params.lambda;

  SparseOperator H;
  H.dim = basis.dimension();
  H.hermitian = true;
  H.row_ptr.assign(H.dim + 1, 0);
  H.col.reserve(H.dim * 8);
  H.val.reserve(H.dim * 8);

  std::vector<Entry> row;
  // beamsplitter hops: (source mode, target mode) per polarization/direction
  static constexpr int hops[4][2] = {{kLV, kRV}, {kRV, kLV}, {kLH, kRH}, {kRH, kLH}};

  for (std::size_t r = 0; r < H.dim; ++r) {
    const Occ occ = basis.occupations(r);
    const int n_photons = occ[0] + occ[1] + occ[2] + occ[3];
    const int delta_n = occ[kLV] + occ[kLH] - occ[kRV] - occ[kRH];
    const int m = occ[kM];
    row.clear();

    // H_C + H_M
    row.push_back({r, params.omega * n_photons + params.omega_m * m});

    // H_I = -g dN x_zpf (M + M^+)
    const double gx = -params.g * x_zpf * delta_n;
    if (gx != 0.0) {
      Occ up = occ;
      up[kM] = m + 1;
      if (const auto idx = basis.index_of(up); idx >= 0)
        row.push_back({static_cast<std::size_t>(idx), gx * std::sqrt(m + 1.0)});
      Occ down = occ;
      down[kM] = m - 1;
      if (const auto idx = basis.index_of(down); idx >= 0)
        row.push_back({static_cast<std::size_t>(idx), gx * std::sqrt(static_cast<double>(m))});
    }

    // H_BS = lambda/2 sum_p (R_p^+ L_p + L_p^+ R_p)
    for (const auto& hop : hops) {
      const int src = hop[0], dst = hop[1];
      if (occ[static_cast<std::size_t>(src)] == 0) continue;
      Occ target = occ;
      target[static_cast<std::size_t>(src)] -= 1;
      target[static_cast<std::size_t>(dst)] += 1;
      const auto idx = basis.index_of(target);
      if (idx < 0) continue;  // hard truncation
      const double amp = half_lambda *
                         std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(src)])) *
                         std::sqrt(static_cast<double>(target[static_cast<std::size_t>(dst)]));
      row.push_back({static_cast<std::size_t>(idx), amp});
    }

    // all terms touch distinct columns, so sorting gives a valid CSR row
    std::sort(row.begin(), row.end(),
              [](const Entry& a, const Entry& b) { return a.col < b.col; });
    for (const Entry& e : row) {
      H.col.push_back(static_cast<std::uint32_t>(e.col));
      H.val.push_back(e.value);
    }
    H.row_ptr[r + 1] = H.col.size();
  }
  return H;
}

SparseOperator build_hamiltonian(const SystemParams& params, const ModeLayout& layout,
                                 std::size_t dimension_cap) {
  if (layout.dimension() > dimension_cap)
    throw DimensionCapError("Hamiltonian dimension " + std::to_string(layout.dimension()) +
                            " exceeds cap " + std::to_string(dimension_cap));
  return build_hamiltonian_on(Basis::product(layout), params);
}

}  // namespace piston::fock
