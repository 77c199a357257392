#include "piston/dynamics.hpp"

#include <cmath>

namespace piston {

EnergyEnvelope energy_envelope(const SystemParams& p, double t) {
  const ResponseCoefficients r = response_closed_form(p, t);
  const double w2 = p.omega_m * p.omega_m;
  EnergyEnvelope e;
  e.t = t;
  e.u = p.mass * (w2 * r.c * r.c + r.c_dot * r.c_dot);
  e.v = p.mass * (w2 * r.d * r.d + r.d_dot * r.d_dot);
  return e;
}

double energy_transfer(const SystemParams& p, const GasSpec& left,
                       const GasSpec& right, double t) {
  const JointMoments jm = joint_moments(left, right);
  const EnergyEnvelope e = energy_envelope(p, t);
  return 0.5 * e.u * jm.delta_n_sq + 0.5 * e.v * jm.delta_k_sq;
}

LongTimeCoefficients long_time_coefficients(const SystemParams& p) {
  const double g2m = p.g * p.g / p.mass;
  const double w2 = p.omega_m * p.omega_m;
  const double l2 = p.lambda * p.lambda;
  LongTimeCoefficients c;
  if (p.kappa == 0.0) {
    const double denom = (l2 + w2) * (l2 + w2);
    c.mu = 2.0 * g2m * (l2 + 3.0 * w2) / denom;
    c.eta = g2m * (3.0 * l2 + w2) / denom;
    c.ratio = (3.0 * l2 + w2) / (2.0 * (l2 + 3.0 * w2));
  } else {
    const double k2 = 4.0 * p.kappa * p.kappa;
    const double dm = p.lambda - p.omega_m;
    const double dp = p.lambda + p.omega_m;
    const double denom = (k2 + dm * dm) * (k2 + dp * dp);
    c.mu = 2.0 * g2m * 2.0 * (k2 + w2) / denom;
    c.eta = 2.0 * g2m * l2 / denom;
    c.ratio = l2 / (2.0 * (k2 + w2));
  }
  return c;
}

double long_time_transfer(const SystemParams& p, const GasSpec& left,
                          const GasSpec& right) {
  const JointMoments jm = joint_moments(left, right);
  const LongTimeCoefficients c = long_time_coefficients(p);
  return 0.5 * c.mu * jm.delta_n_sq + 0.5 * c.eta * jm.delta_k_sq;
}

bool plateau_assumption_ok(const SystemParams& p) {
  if (p.kappa <= 0.0) return false;
  return p.kappa_m * (20.0 / p.kappa) <= 0.01;
}

double g2_time_average(GasFamily family, double mean, double theta) {
  const double gamma = g2_self(family, mean);
  const double c = std::cos(theta);
  return 0.25 * (gamma + 3.0 - c * c);
}

CorrelationSample g2_instantaneous(GasFamily family, double mean, double theta,
                                   double lambda, double t) {
  const double gamma = g2_self(family, mean);
  const double cl = std::cos(lambda * t);
  const double sl = std::sin(lambda * t);
  const double c = std::cos(theta);
  CorrelationSample s;
  s.t = t;
  s.g2_lr = 0.5 * (1.0 + cl * cl) + 0.5 * sl * sl * (gamma - c * c);
  return s;
}

double bunching_measure(GasFamily family, double mean, double theta) {
  const double gamma = g2_self(family, mean);
  const double c = std::cos(theta);
  return 0.25 * (1.0 + c * c - gamma);
}

double cross_correlation(const SystemParams& p, const GasSpec& left,
                         const GasSpec& right, double t) {
  const JointMoments jm = joint_moments(left, right);
  const ResponseCoefficients r = response_closed_form(p, t);
  const double env = std::exp(-2.0 * p.kappa * t);
  const double nu = 2.0 * env * std::cos(p.lambda * t) * r.c;
  const double zeta = 2.0 * env * std::sin(p.lambda * t) * r.d;
  return 0.5 * nu * jm.delta_n_sq + 0.5 * zeta * jm.delta_k_sq;
}

}  // namespace piston
