// dynamics.hpp — first-order observables of the photon piston: membrane
// energy transfer and its envelopes, long-time transfer coefficients, the
// two-mode correlation g_{L,R}, the bunching measure and the photon-membrane
// cross correlation. Pure functions of (params, gas specs, t).

#pragma once

#include "piston/model.hpp"
#include "piston/response.hpp"
#include "piston/statistics.hpp"

namespace piston {

/// Envelopes of the two fluctuation channels,
///   u = m omega_m^2 c^2 + m c'^2,   v = m omega_m^2 d^2 + m d'^2,
/// normalized so that dH_M = u var_n + v (<N> + <N>^2 cos^2 theta); the
/// factor 2 between var_n and the operator value <dN(0)^2> = 2 var_n is
/// absorbed here (dH_M = u/2 <dN^2> + v/2 <dK^2>).
struct EnergyEnvelope {
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
};

EnergyEnvelope energy_envelope(const SystemParams& params, double t);

/// dH_M(t) in angular-frequency units. First-order in g; no smallness check
/// is enforced.
double energy_transfer(const SystemParams& params, const GasSpec& left,
                       const GasSpec& right, double t);

/// Long-time (plateau) transfer coefficients: the reference closed forms,
/// with an exact kappa == 0 branch (the time average is
/// genuinely discontinuous there, not a limit).
///
/// Note: the reference closed forms exceed the long-time averages of u and v
/// by exact factors 4 (mu) and 2 (eta); see the validation report. The
/// plateau of energy_transfer therefore sits at mu/4 dN + eta/2 (...).
struct LongTimeCoefficients {
  double mu = 0.0;
  double eta = 0.0;
  double ratio = 0.0;  // eta / mu
};

LongTimeCoefficients long_time_coefficients(const SystemParams& params);

/// mu var_n + eta (<N> + <N>^2 cos^2 theta); for coherent gases this is
/// literally mu |a|^2 + eta (|a|^2 + |a|^4 cos^2 theta).
double long_time_transfer(const SystemParams& params, const GasSpec& left,
                          const GasSpec& right);

/// The plateau regime needs kappa_m (20/kappa) <= 0.01; callers should warn
/// when this returns false.
bool plateau_assumption_ok(const SystemParams& params);

/// Time-averaged two-mode correlation <g_{L,R}>_t = (gamma + 3 - cos^2)/4.
/// Throws VacuumError for an empty gas.
double g2_time_average(GasFamily family, double mean, double theta);

struct CorrelationSample {
  double t = 0.0;
  double g2_lr = 0.0;
};

/// Instantaneous two-mode correlation at zeroth order in g:
///   g_{L,R}(t) = (1 + cos^2(lambda t))/2 + (sin^2(lambda t)/2)(gamma - cos^2 theta).
/// This form reproduces the (gamma + 3 - cos^2)/4 time average exactly and,
/// unlike the (cos(lambda t) + 3)/4 variant, the exact two-photon
/// interference zero at lambda t = pi/2.
CorrelationSample g2_instantaneous(GasFamily family, double mean, double theta,
                                   double lambda, double t);

/// Bunching measure 1 - <g_{L,R}>_t = (1 + cos^2 theta - gamma)/4; positive
/// means bunched on one side, negative anti-bunched.
double bunching_measure(GasFamily family, double mean, double theta);

/// Symmetrized cross correlation <dN(t) X_M(t)> = nu var_n-channel +
/// zeta current-channel with nu = 2 e^{-2 kappa t} cos(lambda t) c(t),
/// zeta = 2 e^{-2 kappa t} sin(lambda t) d(t).
double cross_correlation(const SystemParams& params, const GasSpec& left,
                         const GasSpec& right, double t);

}  // namespace piston
