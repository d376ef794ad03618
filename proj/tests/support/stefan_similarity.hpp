#pragma once

// Classical one-phase Stefan similarity solution for a superheated vapor layer
// next to a hot wall at x = 0 with the liquid held at the saturation temperature.
//
//   s(t)    = 2 lambda sqrt(alpha t)
//   T(x, t) = T_w - dT erf(x / (2 sqrt(alpha t))) / erf(lambda)
//   lambda exp(lambda^2) erf(lambda) = St / sqrt(pi),  St = cp dT / h_lv
//
// Independent of the solver: only <cmath>.

#include <cmath>
#include <stdexcept>

namespace evap::testing {

struct StefanSimilarity {
  double alpha;   // vapor diffusivity k / (rho cp)
  double t_wall;  // wall temperature
  double t_sat;   // interface temperature
  double lambda;

  StefanSimilarity(double k, double rho, double cp, double h_lv, double t_wall_, double t_sat_)
      : alpha(k / (rho * cp)), t_wall(t_wall_), t_sat(t_sat_) {
    const double stefan = cp * (t_wall - t_sat) / h_lv;
    if (!(stefan > 0)) throw std::invalid_argument("Stefan number must be positive");
    const double target = stefan / std::sqrt(M_PI);
    auto f = [&](double l) { return l * std::exp(l * l) * std::erf(l) - target; };
    double lo = 0.0, hi = 1.0;
    while (f(hi) < 0) hi *= 2;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0 ? lo : hi) = mid;
    }
    lambda = 0.5 * (lo + hi);
  }

  double position(double t) const { return 2 * lambda * std::sqrt(alpha * t); }

  /// Time at which the front sits at x = s.
  double time_at(double s) const {
    const double r = s / (2 * lambda);
    return r * r / alpha;
  }

  double temperature(double x, double t) const {
    return t_wall - (t_wall - t_sat) * std::erf(x / (2 * std::sqrt(alpha * t))) / std::erf(lambda);
  }
};

}  // namespace evap::testing
