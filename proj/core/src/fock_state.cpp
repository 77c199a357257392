#include "piston/fock.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

namespace piston::fock {

namespace {

constexpr double kFactorTail = 1e-8;

double tail_mass(const std::vector<double>& w) {
  return 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
}

}  // namespace

std::vector<double> thermal_weights(double n_bar, int cutoff) {
  std::vector<double> w(static_cast<std::size_t>(cutoff) + 1);
  if (n_bar <= 0.0) {
    w[0] = 1.0;
    return w;
  }
  const double ratio = n_bar / (n_bar + 1.0);
  double p = 1.0 / (n_bar + 1.0);
  for (int k = 0; k <= cutoff; ++k) {
    w[static_cast<std::size_t>(k)] = p;
    p *= ratio;
  }
  return w;
}

std::vector<double> number_weights(const GasSpec& gas, int cutoff) {
  std::vector<double> w(static_cast<std::size_t>(cutoff) + 1, 0.0);
  switch (gas.family) {
    case GasFamily::Fock: {
      const int n = static_cast<int>(std::round(gas.mean));
      if (n <= cutoff) w[static_cast<std::size_t>(n)] = 1.0;
      return w;
    }
    case GasFamily::Coherent: {
      // phase-averaged coherent gas: Poisson number mixture
      double p = std::exp(-gas.mean);
      for (int k = 0; k <= cutoff; ++k) {
        w[static_cast<std::size_t>(k)] = p;
        p *= gas.mean / (k + 1.0);
      }
      return w;
    }
    case GasFamily::Thermal:
      return thermal_weights(gas.mean, cutoff);
  }
  return w;
}

int gas_cutoff_for_tail(const GasSpec& gas, double tail, int hard_max) {
  if (gas.family == GasFamily::Fock) return static_cast<int>(std::round(gas.mean));
  for (int c = 1; c <= hard_max; c = c < 16 ? c + 1 : c * 2) {
    if (tail_mass(number_weights(gas, c)) < tail) {
      // shrink back to the smallest sufficient cutoff
      while (c > 0 && tail_mass(number_weights(gas, c - 1)) < tail) --c;
      return c;
    }
  }
  throw CutoffError("no photon cutoff below " + std::to_string(hard_max) +
                    " reaches tail mass " + std::to_string(tail));
}

int thermal_cutoff_for_tail(double n_bar, double tail, int hard_max) {
  for (int c = 1; c <= hard_max; c = c < 16 ? c + 1 : c * 2) {
    if (tail_mass(thermal_weights(n_bar, c)) < tail) {
      while (c > 0 && tail_mass(thermal_weights(n_bar, c - 1)) < tail) --c;
      return c;
    }
  }
  throw CutoffError("no phonon cutoff below " + std::to_string(hard_max) +
                    " reaches tail mass " + std::to_string(tail));
}

double TruncatedState::norm_error() const {
  double worst = 0.0;
  double wsum = 0.0;
  for (const auto& b : branches) {
    double n2 = 0.0;
    for (const cplx& a : b.amplitudes) n2 += std::norm(a);
    worst = std::max(worst, std::abs(std::sqrt(n2) - 1.0));
    wsum += b.weight;
  }
  return std::max(worst, std::abs(wsum - 1.0));
}

namespace {

// amplitudes of |m>_b for b^+ = cos(theta) R_V^+ + sin(theta) R_H^+:
// sqrt(C(m,k)) cos^k sin^(m-k) on |k>_RV |m-k>_RH
std::vector<double> rotated_amplitudes(int m, double theta) {
  std::vector<double> amp(static_cast<std::size_t>(m) + 1);
  const double c = std::cos(theta), s = std::sin(theta);
  double binom = 1.0;  // C(m, k)
  for (int k = 0; k <= m; ++k) {
    amp[static_cast<std::size_t>(k)] =
        std::sqrt(binom) * std::pow(c, k) * std::pow(s, m - k);
    binom *= static_cast<double>(m - k) / (k + 1.0);
  }
  return amp;
}

void check_factor_tail(const std::vector<double>& w, const char* what, int cutoff) {
  const double tail = tail_mass(w);
  if (!(tail < kFactorTail)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%s distribution leaves tail mass %.3e at cutoff %d (need < %.0e)",
                  what, tail, cutoff, kFactorTail);
    throw CutoffError(buf);
  }
}

}  // namespace

TruncatedState prepare_state(const GasSpec& left, const GasSpec& right,
                             const MembraneSpec& membrane, const ModeLayout& layout,
                             std::size_t dimension_cap) {
  if (layout.dimension() > dimension_cap)
    throw DimensionCapError("state dimension " + std::to_string(layout.dimension()) +
                            " exceeds cap " + std::to_string(dimension_cap));

  auto wl = number_weights(left, layout.photon_cutoff);
  auto wr = number_weights(right, layout.photon_cutoff);
  auto wm = thermal_weights(membrane.n_th, layout.phonon_cutoff);
  check_factor_tail(wl, "left gas", layout.photon_cutoff);
  check_factor_tail(wr, "right gas", layout.photon_cutoff);
  check_factor_tail(wm, "membrane", layout.phonon_cutoff);

  TruncatedState state;
  state.basis = Basis::product(layout);

  double total_weight = 0.0;
  for (int n = 0; n <= layout.photon_cutoff; ++n) {
    if (wl[static_cast<std::size_t>(n)] == 0.0) continue;
    for (int m = 0; m <= layout.photon_cutoff; ++m) {
      if (wr[static_cast<std::size_t>(m)] == 0.0) continue;
      const auto rot = rotated_amplitudes(m, right.theta);
      for (int q = 0; q <= layout.phonon_cutoff; ++q) {
        if (wm[static_cast<std::size_t>(q)] == 0.0) continue;
        StateBranch branch;
        branch.weight = wl[static_cast<std::size_t>(n)] * wr[static_cast<std::size_t>(m)] *
                        wm[static_cast<std::size_t>(q)];
        branch.amplitudes.assign(state.basis.dimension(), 0.0);
        for (int k = 0; k <= m; ++k) {
          const auto idx = state.basis.index_of({n, 0, k, m - k, q});
          branch.amplitudes[static_cast<std::size_t>(idx)] = rot[static_cast<std::size_t>(k)];
        }
        total_weight += branch.weight;
        state.branches.push_back(std::move(branch));
      }
    }
  }
  for (auto& b : state.branches) b.weight /= total_weight;
  return state;
}

// ---------------------------------------------------------------------------
// Binary state dump: magic "PFKS\1", mode-order string, cutoffs, sector,
// time, branch count; per branch weight (f64) and amplitudes as
// little-endian complex64 (float32 re/im pairs).
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'P', 'F', 'K', 'S', '\1'};
constexpr char kModeOrder[] = "LV LH RV RH M";

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("state dump: truncated file");
  return v;
}

}  // namespace

void write_state(const std::string& path, const TruncatedState& state, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t order_len = sizeof(kModeOrder) - 1;
  write_raw(out, order_len);
  out.write(kModeOrder, order_len);
  write_raw(out, static_cast<std::int32_t>(state.basis.layout().photon_cutoff));
  write_raw(out, static_cast<std::int32_t>(state.basis.layout().phonon_cutoff));
  write_raw(out, static_cast<std::int32_t>(state.basis.sector() ? *state.basis.sector() : -1));
  write_raw(out, time);
  write_raw(out, static_cast<std::uint32_t>(state.branches.size()));
  for (const auto& b : state.branches) {
    write_raw(out, b.weight);
    write_raw(out, static_cast<std::uint64_t>(b.amplitudes.size()));
    for (const cplx& a : b.amplitudes) {
      write_raw(out, static_cast<float>(a.real()));
      write_raw(out, static_cast<float>(a.imag()));
    }
  }
}

LoadedState read_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("state dump: bad magic");
  const auto order_len = read_raw<std::uint32_t>(in);
  std::string order(order_len, '\0');
  in.read(order.data(), order_len);
  if (order != kModeOrder) throw std::runtime_error("state dump: unexpected mode order");

  ModeLayout layout;
  layout.photon_cutoff = read_raw<std::int32_t>(in);
  layout.phonon_cutoff = read_raw<std::int32_t>(in);
  const auto sector = read_raw<std::int32_t>(in);
  LoadedState loaded;
  loaded.state.basis = sector < 0 ? Basis::product(layout)
                                  : Basis::photon_sector(layout, sector);
  loaded.time = read_raw<double>(in);
  const auto n_branches = read_raw<std::uint32_t>(in);
  loaded.state.branches.resize(n_branches);
  for (auto& b : loaded.state.branches) {
    b.weight = read_raw<double>(in);
    const auto n_amp = read_raw<std::uint64_t>(in);
    if (n_amp != loaded.state.basis.dimension())
      throw std::runtime_error("state dump: amplitude count does not match layout");
    b.amplitudes.resize(n_amp);
    for (auto& a : b.amplitudes) {
      const float re = read_raw<float>(in);
      const float im = read_raw<float>(in);
      a = cplx(re, im);
    }
  }
  return loaded;
}

}  // namespace piston::fock
