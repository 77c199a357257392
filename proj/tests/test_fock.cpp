#include "piston/fock.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "piston/dynamics.hpp"

using namespace piston;
using fock::Basis;
using fock::ModeLayout;
using fock::Occ;
using fock::SparseOperator;
using fock::TruncatedState;

namespace {

const double kHalfPi = std::acos(0.0);

SystemParams desk_params(double g_over_lambda = 1e-3) {
  SystemParams p;
  p.omega_m = 1.0;
  p.omega = 5.0;
  p.lambda = 10.0;
  p.kappa = 0.0;
  p.kappa_m = 0.0;
  p.mass = 0.5;  // x_zpf = 1
  p.g = g_over_lambda * p.lambda;
  return p;
}

// Independent propagation oracle: dense eigendecomposition of H.
std::vector<fock::cplx> dense_propagate(const SparseOperator& H,
                                        const std::vector<fock::cplx>& v, double t) {
  const auto n = static_cast<Eigen::Index>(H.dim);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t r = 0; r < H.dim; ++r)
    for (std::size_t k = H.row_ptr[r]; k < H.row_ptr[r + 1]; ++k)
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(H.col[k])) = H.val[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  Eigen::VectorXcd psi(n);
  for (Eigen::Index i = 0; i < n; ++i) psi(i) = v[static_cast<std::size_t>(i)];
  Eigen::VectorXcd coeff = es.eigenvectors().adjoint() * psi;
  for (Eigen::Index i = 0; i < n; ++i)
    coeff(i) *= std::exp(fock::cplx(0.0, -es.eigenvalues()(i) * t));
  psi = es.eigenvectors() * coeff;
  std::vector<fock::cplx> out(H.dim);
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = psi(i);
  return out;
}

ScenarioConfig fock_scenario(double theta, double g_over_lambda, double n_th = 0.0) {
  ScenarioConfig c;
  c.params = desk_params(g_over_lambda);
  c.left = GasSpec::fock(1);
  c.right = GasSpec::fock(1, theta);
  c.membrane.n_th = n_th;
  c.grid = {0.0, 6.0 * std::acos(-1.0) / c.params.lambda, 61};
  c.engine = Engine::Oracle;
  return c;
}

}  // namespace

TEST_CASE("basis indexing is row-major with the phonon fastest") {
  ModeLayout layout{2, 3};
  CHECK(layout.dimension() == 81 * 4);
  const Basis b = Basis::product(layout);
  REQUIRE(b.dimension() == layout.dimension());
  std::size_t expect = 0;
  for (int a = 0; a <= 2; ++a)
    for (int bb = 0; bb <= 2; ++bb)
      for (int c = 0; c <= 2; ++c)
        for (int d = 0; d <= 2; ++d)
          for (int m = 0; m <= 3; ++m) {
            const Occ occ{a, bb, c, d, m};
            CHECK(b.index_of(occ) == static_cast<std::ptrdiff_t>(expect));
            CHECK(b.occupations(expect) == occ);
            ++expect;
          }
  CHECK(b.index_of({3, 0, 0, 0, 0}) == -1);
  CHECK(b.index_of({0, 0, 0, 0, 4}) == -1);
}

TEST_CASE("sector basis enumerates exactly the fixed total photon number") {
  ModeLayout layout{3, 2};
  const Basis s = Basis::photon_sector(layout, 3);
  // weak compositions of 3 into 4 parts, each <= 3: C(6,3) = 20
  CHECK(s.dimension() == 20 * 3);
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const Occ occ = s.occupations(i);
    CHECK(occ[0] + occ[1] + occ[2] + occ[3] == 3);
    CHECK(s.index_of(occ) == static_cast<std::ptrdiff_t>(i));
  }
  CHECK(s.index_of({1, 1, 1, 1, 0}) == -1);  // wrong sector
  const Basis p = Basis::product(layout);
  // every sector state maps to a product state with identical occupations
  for (std::size_t i = 0; i < s.dimension(); ++i)
    CHECK(p.index_of(s.occupations(i)) >= 0);
}

TEST_CASE("Hamiltonian structure") {
  SUBCASE("hermiticity spot check for random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.1, 5.0);
    for (int trial = 0; trial < 4; ++trial) {
      SystemParams p = desk_params();
      p.lambda = uni(rng);
      p.omega = uni(rng);
      p.omega_m = uni(rng);
      p.g = uni(rng);
      const auto H = fock::build_hamiltonian(p, ModeLayout{2, 3});
      CHECK(H.hermitian);
      CHECK(H.hermitian_spot_check(rng(), 1000));
    }
  }
  SUBCASE("g = 0 block-diagonalizes per polarization; V-sector eigenvalues omega +- lambda/2") {
    SystemParams p = desk_params();
    p.g = 0.0;
    const ModeLayout layout{1, 1};
    const auto H = fock::build_hamiltonian(p, layout);
    const Basis b = Basis::product(layout);
    const auto lv = static_cast<std::size_t>(b.index_of({1, 0, 0, 0, 0}));
    const auto rv = static_cast<std::size_t>(b.index_of({0, 0, 1, 0, 0}));
    const auto lh = static_cast<std::size_t>(b.index_of({0, 1, 0, 0, 0}));
    CHECK(H.entry(lv, lh) == fock::cplx(0.0));  // no V <-> H mixing
    // 2x2 single-photon V block
    const double a = H.entry(lv, lv).real();
    const double d = H.entry(rv, rv).real();
    const double o = H.entry(lv, rv).real();
    CHECK(H.entry(rv, lv) == H.entry(lv, rv));
    const double mean = 0.5 * (a + d);
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + o * o);
    CHECK(mean + disc == doctest::Approx(p.omega + p.lambda / 2).epsilon(1e-14));
    CHECK(mean - disc == doctest::Approx(p.omega - p.lambda / 2).epsilon(1e-14));
  }
  SUBCASE("g = 0 and lambda = 0 gives a diagonal Hamiltonian") {
    SystemParams p = desk_params();
    p.g = 0.0;
    p.lambda = 0.0;
    const auto H = fock::build_hamiltonian(p, ModeLayout{1, 2});
    for (std::size_t r = 0; r < H.dim; ++r)
      for (std::size_t k = H.row_ptr[r]; k < H.row_ptr[r + 1]; ++k)
        if (H.val[k] != fock::cplx(0.0)) CHECK(H.col[k] == r);
  }
  SUBCASE("dimension cap") {
    CHECK_THROWS_AS((void)fock::build_hamiltonian(desk_params(), ModeLayout{40, 40}),
                    fock::DimensionCapError);
  }
}

TEST_CASE("state preparation") {
  const ModeLayout layout{2, 2};

  SUBCASE("Fock x Fock, theta = 0 is a single basis state") {
    const auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.0),
                                        MembraneSpec{0.0}, layout);
    REQUIRE(st.branches.size() == 1);
    CHECK_FALSE(st.is_mixture());
    const auto idx = st.basis.index_of({1, 0, 1, 0, 0});
    for (std::size_t i = 0; i < st.branches[0].amplitudes.size(); ++i) {
      const double expected = (static_cast<std::ptrdiff_t>(i) == idx) ? 1.0 : 0.0;
      CHECK(st.branches[0].amplitudes[i].real() == doctest::Approx(expected));
    }
    CHECK(st.norm_error() < 1e-12);
  }
  SUBCASE("rotated single photon splits (1/sqrt2, 1/sqrt2) at theta = pi/4") {
    const auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, kHalfPi / 2),
                                        MembraneSpec{0.0}, layout);
    REQUIRE(st.branches.size() == 1);
    const auto& amp = st.branches[0].amplitudes;
    const auto rv = static_cast<std::size_t>(st.basis.index_of({1, 0, 1, 0, 0}));
    const auto rh = static_cast<std::size_t>(st.basis.index_of({1, 0, 0, 1, 0}));
    CHECK(amp[rv].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(amp[rh].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("coherent gas becomes the Poisson number mixture, renormalized") {
    const ModeLayout wide{9, 1};
    const auto st = fock::prepare_state(GasSpec::coherent(0.5), GasSpec::coherent(0.5, 0.0),
                                        MembraneSpec{0.0}, wide, 8'000'000);
    CHECK(st.is_mixture());
    CHECK(st.norm_error() < 1e-10);
    // branch weights recover the Poisson products
    double w_11 = -1.0;
    for (const auto& b : st.branches) {
      // identify the (1,1) branch by its occupation support
      for (std::size_t i = 0; i < b.amplitudes.size(); ++i)
        if (std::abs(b.amplitudes[i]) > 0.999) {
          const Occ occ = st.basis.occupations(i);
          if (occ == Occ{1, 0, 1, 0, 0}) w_11 = b.weight;
        }
    }
    const double p1 = std::exp(-0.5) * 0.5;
    CHECK(w_11 == doctest::Approx(p1 * p1).epsilon(1e-8));
  }
  SUBCASE("insufficient cutoff is an error") {
    CHECK_THROWS_AS((void)fock::prepare_state(GasSpec::fock(3), GasSpec::fock(3, 0.0),
                                              MembraneSpec{0.0}, layout),
                    fock::CutoffError);
    CHECK_THROWS_AS((void)fock::prepare_state(GasSpec::thermal(1.0), GasSpec::thermal(1.0, 0.0),
                                              MembraneSpec{0.0}, layout),
                    fock::CutoffError);
    CHECK_THROWS_AS((void)fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.0),
                                              MembraneSpec{50.0}, layout),
                    fock::CutoffError);
  }
}

TEST_CASE("evolution") {
  SUBCASE("t = 0 is the identity") {
    const ModeLayout layout{2, 2};
    auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.3),
                                  MembraneSpec{0.0}, layout);
    const auto before = st.branches[0].amplitudes;
    const auto H = fock::build_hamiltonian(desk_params(), layout);
    fock::evolve(st, H, 0.0);
    CHECK(st.branches[0].amplitudes == before);
  }
  SUBCASE("g = 0: single V photon tunnels as cos^2(lambda t / 2)") {
    SystemParams p = desk_params();
    p.g = 0.0;
    const ModeLayout layout{1, 1};
    const auto H = fock::build_hamiltonian(p, layout);
    TruncatedState st;
    st.basis = Basis::product(layout);
    st.branches.resize(1);
    st.branches[0].amplitudes.assign(st.basis.dimension(), 0.0);
    st.branches[0].amplitudes[static_cast<std::size_t>(st.basis.index_of({1, 0, 0, 0, 0}))] = 1.0;
    double t = 0.0;
    for (int step = 1; step <= 40; ++step) {
      const double dt = 0.05;
      fock::evolve(st, H, dt);
      t += dt;
      CHECK(std::abs(fock::expectation(st, "n_l", p) -
                     std::pow(std::cos(p.lambda * t / 2), 2)) < 1e-10);
    }
  }
  SUBCASE("Krylov propagation matches a dense eigendecomposition") {
    const SystemParams p = desk_params(0.05);
    const ModeLayout layout{2, 4};
    const auto H = fock::build_hamiltonian(p, layout);
    auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.6),
                                  MembraneSpec{0.0}, layout);
    const auto ref = dense_propagate(H, st.branches[0].amplitudes, 2.7);
    fock::evolve(st, H, 2.7);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
      worst = std::max(worst, std::abs(ref[i] - st.branches[0].amplitudes[i]));
    CHECK(worst < 1e-10);
  }
  SUBCASE("norm preserved to 1e-10 over 1000 steps") {
    const SystemParams p = desk_params(0.01);
    const ModeLayout layout{2, 3};
    const auto H = fock::build_hamiltonian(p, layout);
    auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.9),
                                  MembraneSpec{0.0}, layout);
    for (int i = 0; i < 1000; ++i) fock::evolve(st, H, 0.01);
    CHECK(st.norm_error() < 1e-10);
  }
  SUBCASE("preconditions") {
    const ModeLayout layout{1, 1};
    auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.0),
                                  MembraneSpec{0.0}, layout);
    auto H = fock::build_hamiltonian(desk_params(), layout);
    CHECK_THROWS_AS(fock::evolve(st, H, 0.1, 1e-13), std::invalid_argument);
    H.hermitian = false;
    CHECK_THROWS_AS(fock::evolve(st, H, 0.1), std::invalid_argument);
  }
}

TEST_CASE("expectation values") {
  const SystemParams p = desk_params();
  SUBCASE("vacuum and ground state") {
    const ModeLayout layout{1, 1};
    const auto st = fock::prepare_state(GasSpec::fock(0), GasSpec::fock(0, 0.0),
                                        MembraneSpec{0.0}, layout);
    CHECK(fock::expectation(st, "h_m", p) == 0.0);
    CHECK(fock::expectation(st, "n_total", p) == 0.0);
    CHECK(fock::expectation(st, "x_m", p) == 0.0);
  }
  SUBCASE("HOM state: N_L N_R vanishes at lambda t = pi/2") {
    SystemParams p0 = desk_params();
    p0.g = 0.0;
    const ModeLayout layout{2, 1};
    const auto H = fock::build_hamiltonian(p0, layout);
    auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.0),
                                  MembraneSpec{0.0}, layout);
    fock::evolve(st, H, kHalfPi / p0.lambda);
    CHECK(std::abs(fock::expectation(st, "nl_nr", p0)) < 1e-12);
    CHECK(fock::expectation(st, "n_total", p0) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("unknown observable") {
    const ModeLayout layout{1, 1};
    const auto st = fock::prepare_state(GasSpec::fock(0), GasSpec::fock(0, 0.0),
                                        MembraneSpec{0.0}, layout);
    CHECK_THROWS_AS((void)fock::expectation(st, "banana", p), std::invalid_argument);
  }
}

TEST_CASE("oracle run") {
  SUBCASE("matches a product-basis evolution of the same scenario") {
    ScenarioConfig c = fock_scenario(kHalfPi / 2, 0.02);
    c.grid.n_steps = 7;
    fock::OracleOptions opts;
    opts.phonon_cutoff = 6;
    const auto run = fock::oracle_run(validate(c), opts);

    const ModeLayout layout{2, 6};
    auto st = fock::prepare_state(c.left, c.right, c.membrane, layout);
    const auto H = fock::build_hamiltonian(c.params, layout);
    const auto times = c.grid.times();
    double prev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      fock::evolve(st, H, times[i] - prev);
      prev = times[i];
      for (const char* name : {"n_l", "n_r", "nl_nr", "h_m", "x_m", "dn_xm"}) {
        const double a = fock::expectation(st, name, c.params);
        const double b = run.series.at(name)[i];
        CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
      }
    }
  }
  SUBCASE("symmetric initial states keep <X_M> at zero and conserve N and H") {
    const auto run = fock::oracle_run(validate(fock_scenario(0.0, 1e-3)));
    for (double x : run.series.at("x_m")) CHECK(std::abs(x) < 1e-9);
    const auto& n = run.series.at("n_total");
    const auto& h = run.series.at("h_total");
    for (std::size_t i = 0; i < n.size(); ++i) {
      CHECK(n[i] == doctest::Approx(n[0]).epsilon(1e-9));
      CHECK(h[i] == doctest::Approx(h[0]).epsilon(1e-9));
    }
  }
  SUBCASE("indistinguishable-to-distinguishable energy ratio approaches 2") {
    const auto r0 = fock::oracle_run(validate(fock_scenario(0.0, 1e-3)));
    const auto r90 = fock::oracle_run(validate(fock_scenario(kHalfPi, 1e-3)));
    const auto& dh0 = r0.series.at("delta_h_m");
    const auto& dh90 = r90.series.at("delta_h_m");
    // compare away from the zeros of the envelope
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < dh0.size(); ++i) {
      num += dh0[i];
      den += dh90[i];
    }
    CHECK(num / den == doctest::Approx(2.0).epsilon(0.01));
  }
  SUBCASE("oracle requires the closed system") {
    ScenarioConfig c = fock_scenario(0.0, 1e-3);
    c.engine = Engine::Analytic;
    c.params.kappa = 0.1;
    CHECK_THROWS_AS((void)fock::oracle_run(validate(c)), std::invalid_argument);
  }
}

TEST_CASE("oracle vs analytic first order (fast single-angle check)") {
  const ScenarioConfig c = fock_scenario(kHalfPi / 2, 1e-3);
  fock::OracleOptions opts;
  opts.phonon_cutoff = 6;
  const auto run = fock::oracle_run(validate(c), opts);
  const auto times = c.grid.times();
  double worst_dh = 0.0, worst_g2 = 0.0, worst_dnx = 0.0;
  double scale_dh = 0.0, scale_g2 = 0.0, scale_dnx = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dh_a = energy_transfer(c.params, c.left, c.right, times[i]);
    const double g2_a =
        g2_instantaneous(c.right.family, c.right.mean, c.right.theta, c.params.lambda, times[i])
            .g2_lr;
    const double dnx_a = cross_correlation(c.params, c.left, c.right, times[i]);
    worst_dh = std::max(worst_dh, std::abs(dh_a - run.series.at("delta_h_m")[i]));
    worst_g2 = std::max(worst_g2, std::abs(g2_a - run.series.at("g2_lr")[i]));
    worst_dnx = std::max(worst_dnx, std::abs(dnx_a - run.series.at("dn_xm")[i]));
    scale_dh = std::max(scale_dh, std::abs(dh_a));
    scale_g2 = std::max(scale_g2, std::abs(g2_a));
    scale_dnx = std::max(scale_dnx, std::abs(dnx_a));
  }
  CHECK(worst_dh / scale_dh < 0.01);
  CHECK(worst_g2 / scale_g2 < 0.01);
  CHECK(worst_dnx / scale_dnx < 0.01);
}

TEST_CASE("state dump round trip") {
  const ModeLayout layout{2, 3};
  auto st = fock::prepare_state(GasSpec::fock(1), GasSpec::fock(1, 0.4),
                                MembraneSpec{0.0}, layout);
  const std::string path = "state_dump_test.bin";
  fock::write_state(path, st, 1.25);
  const auto loaded = fock::read_state(path);
  CHECK(loaded.time == 1.25);
  CHECK(loaded.state.basis.dimension() == st.basis.dimension());
  REQUIRE(loaded.state.branches.size() == st.branches.size());
  for (std::size_t b = 0; b < st.branches.size(); ++b) {
    CHECK(loaded.state.branches[b].weight == st.branches[b].weight);
    for (std::size_t i = 0; i < st.branches[b].amplitudes.size(); ++i)
      CHECK(std::abs(loaded.state.branches[b].amplitudes[i] - st.branches[b].amplitudes[i]) <
            1e-7);  // complex64 storage
  }
  std::remove(path.c_str());
}
