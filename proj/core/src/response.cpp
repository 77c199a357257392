#include "piston/response.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace piston {

namespace {

using cplx = std::complex<double>;

// psi(w) = (e^w - 1)/w, series-stabilized for small |w| so that divided
// differences of exponentials stay accurate through confluent arguments.
cplx psi(cplx w) {
  if (std::abs(w) < 0.5) {
    cplx sum = 1.0, term = 1.0;
    for (int k = 1; k < 26; ++k) {
      term *= w / static_cast<double>(k + 1);
      sum += term;
      if (std::abs(term) < 1e-20) break;
    }
    return sum;
  }
  return (std::exp(w) - 1.0) / w;
}

// First divided difference of e^{rt} between nodes s and r:
//   (e^{st} - e^{rt})/(s - r) = e^{rt} t psi((s-r) t)
cplx dd1(cplx s, cplx r, double t) { return std::exp(r * t) * t * psi((s - r) * t); }

// d/dt of dd1: (s e^{st} - r e^{rt})/(s - r) = e^{rt} (s t psi((s-r)t) + 1)
cplx dd1_dot(cplx s, cplx r, double t) {
  return std::exp(r * t) * (s * t * psi((s - r) * t) + 1.0);
}

}  // namespace

ResponseCoefficients response_closed_form(const SystemParams& p, double t) {
  if (t < 0.0) throw std::domain_error("response_closed_form: t must be >= 0");

  const double om = p.omega_m, km = p.kappa_m;
  const cplx Omega = std::sqrt(cplx(om * om - km * km, 0.0));
  if (std::abs(Omega) < 1e-9 * om)
    throw std::domain_error("response_closed_form: critically damped membrane unsupported");

  const cplx rp = cplx(-km, 0.0) + cplx(0.0, 1.0) * Omega;
  const cplx rm = cplx(-km, 0.0) - cplx(0.0, 1.0) * Omega;
  const cplx s = cplx(-2.0 * p.kappa, p.lambda);
  const double f0 = p.g / p.mass;

  ResponseCoefficients rc;
  rc.t = t;

  // Forced channels: z solves z'' + 2 km z' + om^2 z = f0 e^{st}, zero ICs;
  // c = Re z (cos forcing), d = Im z (sin forcing).
  const cplx z = f0 * (dd1(s, rp, t) - dd1(s, rm, t)) / (rp - rm);
  const cplx zd = f0 * (dd1_dot(s, rp, t) - dd1_dot(s, rm, t)) / (rp - rm);
  rc.c = z.real();
  rc.d = z.imag();
  rc.c_dot = zd.real();
  rc.d_dot = zd.imag();

  // Homogeneous channels (real parts are exact; Omega may be imaginary for
  // an overdamped membrane, in which case cos/sin become cosh/sinh).
  const double decay = std::exp(-km * t);
  const cplx cosOt = std::cos(Omega * t);
  const cplx sinOt = std::sin(Omega * t);
  rc.h = decay * (cosOt + (km / Omega) * sinOt).real();
  rc.h_dot = -decay * ((om * om / Omega) * sinOt).real();
  rc.j = decay * (sinOt / Omega).real() / p.mass;
  rc.j_dot = decay * (cosOt - (km / Omega) * sinOt).real() / p.mass;
  return rc;
}

std::vector<ResponseCoefficients> response_numeric(const SystemParams& params,
                                                   const ForcingSpec& forcing,
                                                   std::span<const double> t_grid) {
  namespace odeint = boost::numeric::odeint;
  using state_type = std::array<double, 2>;

  if (t_grid.empty()) return {};
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("response_numeric: t_grid must be strictly increasing");

  const double om2 = params.omega_m * params.omega_m;
  const double km = params.kappa_m;

  enum Channel { kC, kD, kH, kJ };
  std::vector<ResponseCoefficients> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) out[i].t = t_grid[i];

  for (int channel = kC; channel <= kJ; ++channel) {
    auto rhs = [&](const state_type& y, state_type& dy, double t) {
      double f = 0.0;
      if (channel == kC)
        f = forcing.amplitude_cos * std::exp(-forcing.decay * t) * std::cos(forcing.carrier * t);
      else if (channel == kD)
        f = forcing.amplitude_sin * std::exp(-forcing.decay * t) * std::sin(forcing.carrier * t);
      dy[0] = y[1];
      dy[1] = f - 2.0 * km * y[1] - om2 * y[0];
    };

    state_type y{0.0, 0.0};
    if (channel == kH) y = {1.0, 0.0};
    if (channel == kJ) y = {0.0, 1.0 / params.mass};

    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<state_type>>(1e-12, 1e-12);
    double t = t_grid[0] > 0.0 ? 0.0 : t_grid[0];
    double dt = (t_grid.back() - t) / (100.0 * t_grid.size());
    if (dt <= 0.0) dt = 1e-6;

    std::size_t next = 0;
    while (next < t_grid.size()) {
      const double target = t_grid[next];
      while (t < target) {
        double step = std::min(dt, target - t);
        const auto result = stepper.try_step(rhs, y, t, step);
        dt = step;  // controller's suggestion: grown on success, shrunk on reject
        if (result != odeint::success && dt < 1e-300)
          throw std::runtime_error("response_numeric: step size underflow at t = " +
                                   std::to_string(t));
      }
      auto& rc = out[next];
      switch (channel) {
        case kC: rc.c = y[0]; rc.c_dot = y[1]; break;
        case kD: rc.d = y[0]; rc.d_dot = y[1]; break;
        case kH: rc.h = y[0]; rc.h_dot = y[1]; break;
        case kJ: rc.j = y[0]; rc.j_dot = y[1]; break;
      }
      ++next;
    }
  }
  return out;
}

}  // namespace piston
