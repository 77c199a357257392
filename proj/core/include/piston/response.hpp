// response.hpp — membrane response to the photon-induced forcing.
//
// The displacement obeys
//   x'' + 2 kappa_m x' + omega_m^2 x = F(t)/1,
// with F(t) = F0 exp(-2 kappa t) {cos, sin}(lambda t) for the two forced
// channels (F0 = g/m) and F = 0 for the two homogeneous channels. The trial
// solution splits as
//   X_M(t) = c(t) dN(0) + d(t) dK(0) + h(t) X_M(0) + j(t) P_M(0),
// with c(0)=d(0)=c'(0)=d'(0)=0, h(0)=1, h'(0)=0, j(0)=0, j'(0)=1/m.

#pragma once

#include <span>
#include <vector>

#include "piston/model.hpp"

namespace piston {

struct ResponseCoefficients {
  double t = 0.0;
  double c = 0.0, d = 0.0, h = 1.0, j = 0.0;
  double c_dot = 0.0, d_dot = 0.0, h_dot = 0.0, j_dot = 0.0;
};

/// Analytic solution of all four channels at time t >= 0. Uniformly stable
/// through the lambda -> omega_m resonance (degenerates to the exact
/// t-linear secular envelope). Throws std::domain_error for a critically
/// damped membrane (kappa_m ~= omega_m), which no supported scenario reaches.
ResponseCoefficients response_closed_form(const SystemParams& params, double t);

/// Forcing of the scalar oscillator equation: amplitude_cos drives the
/// dN(0)-cos channel, amplitude_sin the dK(0)-sin channel.
struct ForcingSpec {
  double amplitude_cos = 0.0;
  double amplitude_sin = 0.0;
  double decay = 0.0;    // 2 kappa
  double carrier = 0.0;  // lambda

  static ForcingSpec from(const SystemParams& p) {
    return ForcingSpec{p.g / p.mass, p.g / p.mass, 2.0 * p.kappa, p.lambda};
  }
};

/// Independent numeric oracle: integrates the four channels with an adaptive
/// Runge-Kutta-Fehlberg 7(8) stepper at fixed local tolerance 1e-12 and
/// reports them on the requested grid. Not a user-facing solver.
std::vector<ResponseCoefficients> response_numeric(const SystemParams& params,
                                                   const ForcingSpec& forcing,
                                                   std::span<const double> t_grid);

}  // namespace piston
