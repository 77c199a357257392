#include "piston/statistics.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "doctest.h"

using namespace piston;

namespace {

// Brute-force moments over the explicit number distribution, truncated at
// tail mass < 1e-12. Independent of the closed forms under test.
struct BruteMoments {
  double mean, var, g2;
};

BruteMoments brute_force(GasFamily family, double mean) {
  std::vector<double> p;
  switch (family) {
    case GasFamily::Fock: {
      const int n = static_cast<int>(std::llround(mean));
      p.assign(static_cast<std::size_t>(n) + 1, 0.0);
      p.back() = 1.0;
      break;
    }
    case GasFamily::Coherent: {
      // tail mass far below the 1e-12 requirement so the n^2-weighted
      // moments converge to the checked 1e-10
      double w = std::exp(-mean), total = w;
      p.push_back(w);
      for (int k = 1; total < 1.0 - 1e-12 || w > 1e-18; ++k) {
        w *= mean / k;
        p.push_back(w);
        total += w;
        REQUIRE(k < 100000);
      }
      break;
    }
    case GasFamily::Thermal: {
      const double r = mean / (1.0 + mean);
      double w = 1.0 / (1.0 + mean), total = w;
      p.push_back(w);
      for (int k = 1; total < 1.0 - 1e-12 || w > 1e-18; ++k) {
        w *= r;
        p.push_back(w);
        total += w;
        REQUIRE(k < 10000000);
      }
      break;
    }
  }
  double m1 = 0, m2 = 0, nn1 = 0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double dn = static_cast<double>(n);
    m1 += p[n] * dn;
    m2 += p[n] * dn * dn;
    nn1 += p[n] * dn * (dn - 1.0);
  }
  return {m1, m2 - m1 * m1, m1 > 0 ? nn1 / (m1 * m1) : 0.0};
}

}  // namespace

TEST_CASE("closed-form moments per family") {
  const GasMoments f1 = gas_moments(GasSpec::fock(1));
  CHECK(f1.mean_n == 1.0);
  CHECK(f1.var_n == 0.0);
  CHECK(f1.g2_self == 0.0);

  const GasMoments c4 = gas_moments(GasSpec::coherent(4.0));
  CHECK(c4.mean_n == 4.0);
  CHECK(c4.var_n == 4.0);
  CHECK(c4.g2_self == 1.0);

  const GasMoments t2 = gas_moments(GasSpec::thermal(2.0));
  CHECK(t2.mean_n == 2.0);
  CHECK(t2.var_n == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(t2.g2_self == 2.0);
}

TEST_CASE("vacuum is tagged, never NaN") {
  const GasMoments v = gas_moments(GasSpec::fock(0));
  CHECK(v.vacuum);
  CHECK(v.mean_n == 0.0);
  CHECK(std::isfinite(v.g2_self));
  CHECK_THROWS_AS((void)g2_self(GasFamily::Fock, 0.0), VacuumError);
  CHECK_THROWS_AS((void)g2_self(GasFamily::Coherent, 0.0), VacuumError);
}

TEST_CASE("moments agree with brute-force distribution sums") {
  const double means[] = {0.5, 1.0, 2.0, 5.0};
  for (double mean : means) {
    for (GasFamily family : {GasFamily::Coherent, GasFamily::Thermal}) {
      const BruteMoments ref = brute_force(family, mean);
      const GasMoments got = gas_moments(GasSpec{family, mean, 0.0});
      CHECK(got.mean_n == doctest::Approx(ref.mean).epsilon(1e-10));
      CHECK(got.var_n == doctest::Approx(ref.var).epsilon(1e-10));
      CHECK(got.g2_self == doctest::Approx(ref.g2).epsilon(1e-10));
    }
  }
  for (int n = 1; n <= 6; ++n) {
    const BruteMoments ref = brute_force(GasFamily::Fock, n);
    const GasMoments got = gas_moments(GasSpec::fock(n));
    CHECK(got.var_n == doctest::Approx(ref.var).epsilon(1e-12));
    CHECK(got.g2_self == doctest::Approx(ref.g2).epsilon(1e-12));
  }
}

TEST_CASE("g2 identity holds whenever the gas is populated") {
  for (GasFamily family : {GasFamily::Fock, GasFamily::Coherent, GasFamily::Thermal})
    for (double mean : {1.0, 2.0, 5.0}) {
      const GasMoments m = gas_moments(GasSpec{family, mean, 0.0});
      CHECK(m.g2_self ==
            doctest::Approx((m.var_n - m.mean_n) / (m.mean_n * m.mean_n) + 1.0).epsilon(1e-12));
    }
}

namespace {

// <1,1| dK^2 |1,1> evaluated directly on the four-mode Fock basis with
// photon cutoff 2 -- independent of joint_moments. The right photon sits in
// the rotated mode cos(theta) R_V^+ + sin(theta) R_H^+.
double dk_squared_two_photons(double theta) {
  constexpr int cut = 2;  // occupations 0..2 per mode
  constexpr int dim = (cut + 1) * (cut + 1) * (cut + 1) * (cut + 1);
  auto idx = [](int lv, int lh, int rv, int rh) {
    return ((lv * 3 + lh) * 3 + rv) * 3 + rh;
  };
  std::vector<std::complex<double>> psi(dim, 0.0);
  psi[static_cast<std::size_t>(idx(1, 0, 1, 0))] = std::cos(theta);
  psi[static_cast<std::size_t>(idx(1, 0, 0, 1))] = std::sin(theta);

  // dK = i sum_p (R_p^+ L_p - L_p^+ R_p); apply twice
  auto apply_dk = [&](const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out(dim, 0.0);
    for (int lv = 0; lv <= cut; ++lv)
      for (int lh = 0; lh <= cut; ++lh)
        for (int rv = 0; rv <= cut; ++rv)
          for (int rh = 0; rh <= cut; ++rh) {
            const auto amp = in[static_cast<std::size_t>(idx(lv, lh, rv, rh))];
            if (amp == std::complex<double>(0.0)) continue;
            const std::complex<double> i_unit(0.0, 1.0);
            // R_V^+ L_V
            if (lv >= 1 && rv + 1 <= cut)
              out[static_cast<std::size_t>(idx(lv - 1, lh, rv + 1, rh))] +=
                  i_unit * std::sqrt(static_cast<double>(lv) * (rv + 1)) * amp;
            // -L_V^+ R_V
            if (rv >= 1 && lv + 1 <= cut)
              out[static_cast<std::size_t>(idx(lv + 1, lh, rv - 1, rh))] -=
                  i_unit * std::sqrt(static_cast<double>(rv) * (lv + 1)) * amp;
            // R_H^+ L_H
            if (lh >= 1 && rh + 1 <= cut)
              out[static_cast<std::size_t>(idx(lv, lh - 1, rv, rh + 1))] +=
                  i_unit * std::sqrt(static_cast<double>(lh) * (rh + 1)) * amp;
            // -L_H^+ R_H
            if (rh >= 1 && lh + 1 <= cut)
              out[static_cast<std::size_t>(idx(lv, lh + 1, rv, rh - 1))] -=
                  i_unit * std::sqrt(static_cast<double>(rh) * (lh + 1)) * amp;
          }
    return out;
  };
  const auto dk1 = apply_dk(psi);
  double norm2 = 0.0;
  for (const auto& a : dk1) norm2 += std::norm(a);
  return norm2;  // <psi| dK^+ dK |psi> with dK hermitian
}

}  // namespace

TEST_CASE("joint moments against direct operator evaluation") {
  const JointMoments j0 = joint_moments(GasSpec::fock(1), GasSpec::fock(1, 0.0));
  CHECK(j0.delta_k_sq == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(j0.delta_k_sq == doctest::Approx(dk_squared_two_photons(0.0)).epsilon(1e-12));
  CHECK(j0.delta_n_sq == 0.0);

  const double half_pi = std::acos(0.0);
  const JointMoments j90 = joint_moments(GasSpec::fock(1), GasSpec::fock(1, half_pi));
  CHECK(j90.delta_k_sq == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(j90.delta_k_sq == doctest::Approx(dk_squared_two_photons(half_pi)).epsilon(1e-12));

  for (double theta : {0.2, 0.6, 1.1})
    CHECK(joint_moments(GasSpec::fock(1), GasSpec::fock(1, theta)).delta_k_sq ==
          doctest::Approx(dk_squared_two_photons(theta)).epsilon(1e-12));

  const JointMoments vac = joint_moments(GasSpec::fock(0), GasSpec::fock(0));
  CHECK(vac.delta_n_sq == 0.0);
  CHECK(vac.delta_k_sq == 0.0);
}

TEST_CASE("delta_k_sq is non-increasing in theta and exact at pi/2") {
  const double half_pi = std::acos(0.0);
  for (double mean : {0.5, 1.0, 2.0, 5.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 32; ++i) {
      const double theta = half_pi * i / 32.0;
      const auto j = joint_moments(GasSpec::coherent(mean), GasSpec::coherent(mean, theta));
      CHECK(j.delta_k_sq <= prev + 1e-12);
      prev = j.delta_k_sq;
    }
    CHECK(joint_moments(GasSpec::thermal(mean), GasSpec::thermal(mean, half_pi)).delta_k_sq ==
          doctest::Approx(2.0 * mean).epsilon(1e-12));
  }
}

TEST_CASE("joint moments reject mismatched gases") {
  CHECK_THROWS_AS((void)joint_moments(GasSpec::fock(1), GasSpec::coherent(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)joint_moments(GasSpec::thermal(1.0), GasSpec::thermal(2.0)),
                  std::invalid_argument);
}
