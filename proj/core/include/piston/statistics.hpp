// statistics.hpp — initial-state photon moments feeding the analytic
// formulas. Pure closed forms, thread-safe.

#pragma once

#include <stdexcept>

#include "piston/model.hpp"

namespace piston {

/// Raised when an operation needs photons but the gas is vacuum.
class VacuumError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Number moments of a single gas. g2_self is the same-side second order
/// coherence <N(N-1)>/<N>^2, undefined for a vacuum gas (tagged, never NaN).
struct GasMoments {
  double mean_n = 0.0;
  double var_n = 0.0;
  bool vacuum = true;
  double g2_self = 0.0;  // meaningful only when !vacuum
};

GasMoments gas_moments(const GasSpec& spec);

/// Bare self-coherence of a family; throws VacuumError for an empty gas.
double g2_self(GasFamily family, double mean);

/// The two operator fluctuations that drive the membrane:
///   delta_n_sq = <dN(0)^2> = 2 var            (imbalance channel)
///   delta_k_sq = <dK(0)^2> = 2<N> + 2<N>^2 cos^2(theta)   (current channel)
/// Both are literal operator expectations for left/right gases that are
/// diagonal in their own number basis.
struct JointMoments {
  double delta_n_sq = 0.0;
  double delta_k_sq = 0.0;
  double cos2_theta = 0.0;
};

/// Requires matching family and mean (the admissible initial condition).
JointMoments joint_moments(const GasSpec& left, const GasSpec& right);

}  // namespace piston
