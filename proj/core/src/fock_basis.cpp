#include "piston/fock.hpp"

#include <random>

namespace piston::fock {

std::size_t Basis::pack(int a, int b, int c, int d) const {
  const std::size_t p = static_cast<std::size_t>(layout_.photon_cutoff) + 1;
  return ((static_cast<std::size_t>(a) * p + b) * p + c) * p + d;
}

Basis Basis::product(const ModeLayout& layout) {
  if (layout.photon_cutoff < 1 || layout.phonon_cutoff < 1)
    throw std::invalid_argument("ModeLayout cutoffs must be >= 1");
  Basis b;
  b.layout_ = layout;
  b.dim_ = layout.dimension();
  return b;
}

Basis Basis::photon_sector(const ModeLayout& layout, int total_photons) {
  if (layout.photon_cutoff < 1 || layout.phonon_cutoff < 1)
    throw std::invalid_argument("ModeLayout cutoffs must be >= 1");
  if (total_photons < 0)
    throw std::invalid_argument("total photon number must be >= 0");
  Basis b;
  b.layout_ = layout;
  b.sector_ = total_photons;
  const int pc = layout.photon_cutoff;
  const std::size_t p = static_cast<std::size_t>(pc) + 1;
  b.photon_rank_.assign(p * p * p * p, -1);
  for (int a = 0; a <= pc; ++a)
    for (int bb = 0; bb <= pc; ++bb)
      for (int c = 0; c <= pc; ++c) {
        const int d = total_photons - a - bb - c;
        if (d < 0 || d > pc) continue;
        b.photon_rank_[b.pack(a, bb, c, d)] =
            static_cast<std::int32_t>(b.photon_states_.size());
        b.photon_states_.push_back({a, bb, c, d});
      }
  b.dim_ = b.photon_states_.size() *
           (static_cast<std::size_t>(layout.phonon_cutoff) + 1);
  return b;
}

Occ Basis::occupations(std::size_t index) const {
  const std::size_t nm = static_cast<std::size_t>(layout_.phonon_cutoff) + 1;
  const int m = static_cast<int>(index % nm);
  std::size_t ph = index / nm;
  if (sector_) {
    const auto& s = photon_states_[ph];
    return {s[0], s[1], s[2], s[3], m};
  }
  const std::size_t p = static_cast<std::size_t>(layout_.photon_cutoff) + 1;
  const int d = static_cast<int>(ph % p); ph /= p;
  const int c = static_cast<int>(ph % p); ph /= p;
  const int b = static_cast<int>(ph % p); ph /= p;
  const int a = static_cast<int>(ph);
  return {a, b, c, d, m};
}

std::ptrdiff_t Basis::index_of(const Occ& occ) const {
  const int pc = layout_.photon_cutoff;
  const int mc = layout_.phonon_cutoff;
  for (int i = 0; i < 4; ++i)
    if (occ[static_cast<std::size_t>(i)] < 0 || occ[static_cast<std::size_t>(i)] > pc) return -1;
  if (occ[4] < 0 || occ[4] > mc) return -1;
  const std::size_t nm = static_cast<std::size_t>(mc) + 1;
  if (sector_) {
    const std::int32_t slot = photon_rank_[pack(occ[0], occ[1], occ[2], occ[3])];
    if (slot < 0) return -1;
    return static_cast<std::ptrdiff_t>(static_cast<std::size_t>(slot) * nm + occ[4]);
  }
  return static_cast<std::ptrdiff_t>(pack(occ[0], occ[1], occ[2], occ[3]) * nm + occ[4]);
}

void SparseOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  for (std::size_t r = 0; r < dim; ++r) {
    cplx acc = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      acc += val[k] * in[col[k]];
    out[r] = acc;
  }
}

cplx SparseOperator::entry(std::size_t r, std::size_t c) const {
  for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
    if (col[k] == c) return val[k];
  return 0.0;
}

bool SparseOperator::hermitian_spot_check(std::uint64_t seed, int samples) const {
  if (nonzeros() == 0) return true;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, nonzeros() - 1);
  // row of a flat entry index by binary search over row_ptr
  auto row_of = [this](std::size_t k) {
    std::size_t lo = 0, hi = dim;
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      (row_ptr[mid] <= k ? lo : hi) = mid;
    }
    return lo;
  };
  for (int s = 0; s < samples; ++s) {
    const std::size_t k = pick(rng);
    const std::size_t r = row_of(k);
    const cplx transposed = entry(col[k], r);
    if (std::abs(std::conj(transposed) - val[k]) >
        1e-12 * (1.0 + std::abs(val[k])))
      return false;
  }
  return true;
}

}  // namespace piston::fock
