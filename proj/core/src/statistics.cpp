#include "piston/statistics.hpp"

#include <cmath>

namespace piston {

GasMoments gas_moments(const GasSpec& spec) {
  GasMoments m;
  m.mean_n = spec.mean;
  m.vacuum = spec.is_vacuum();
  switch (spec.family) {
    case GasFamily::Fock: {
      const double n = std::round(spec.mean);
      m.mean_n = n;
      m.var_n = 0.0;
      if (!m.vacuum) m.g2_self = 1.0 - 1.0 / n;
      break;
    }
    case GasFamily::Coherent:
      m.var_n = spec.mean;
      if (!m.vacuum) m.g2_self = 1.0;
      break;
    case GasFamily::Thermal:
      m.var_n = spec.mean + spec.mean * spec.mean;
      if (!m.vacuum) m.g2_self = 2.0;
      break;
  }
  return m;
}

double g2_self(GasFamily family, double mean) {
  GasSpec spec{family, mean, 0.0};
  GasMoments m = gas_moments(spec);
  if (m.vacuum) throw VacuumError("g2_self is undefined for a vacuum gas");
  return m.g2_self;
}

JointMoments joint_moments(const GasSpec& left, const GasSpec& right) {
  if (left.family != right.family)
    throw std::invalid_argument("joint_moments: gases must share the statistics family");
  if (std::abs(left.mean - right.mean) > 1e-12 * std::max(1.0, left.mean))
    throw std::invalid_argument("joint_moments: gases must share the mean photon number");

  const GasMoments m = gas_moments(left);
  const double c = std::cos(right.theta);
  JointMoments j;
  j.cos2_theta = c * c;
  j.delta_n_sq = 2.0 * m.var_n;
  j.delta_k_sq = 2.0 * m.mean_n + 2.0 * m.mean_n * m.mean_n * j.cos2_theta;
  return j;
}

}  // namespace piston
