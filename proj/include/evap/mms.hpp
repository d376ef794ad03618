#pragma once

#include <cmath>

#include "evap/moving_mesh.hpp"
#include "evap/problem.hpp"

namespace evap {

enum class Phase { Vapor, Liquid };

template <typename Scalar>
struct ExactValue {
  Scalar T, T_x, T_xx, T_t;
};

/// Manufactured field and its derivatives at (x, t).
template <typename Scalar>
ExactValue<Scalar> mms_exact(const MmsDescriptor<Scalar>& d, Phase phase, Scalar t_delta,
                             Scalar x, Scalar t) {
  const auto& f = phase == Phase::Vapor ? d.vapor : d.liquid;
  const Scalar X = d.interface_position(t);
  const Scalar Xdot = d.interface_velocity(t);
  const Scalar arg = f.wavenumber * x - f.frequency * t + f.phase;
  const Scalar c = std::cos(arg);
  const Scalar s = std::sin(arg);
  const Scalar A = f.amplitude;
  const Scalar dx = x - X;
  return {t_delta + A * dx * c,
          A * c - A * dx * f.wavenumber * s,
          -Scalar(2) * A * f.wavenumber * s - A * dx * f.wavenumber * f.wavenumber * c,
          -A * Xdot * c + A * dx * f.frequency * s};
}

template <typename Scalar>
Vector<Scalar> mms_nodal(const MmsDescriptor<Scalar>& d, Phase phase, Scalar t_delta,
                         const Vector<Scalar>& x, Scalar t) {
  Vector<Scalar> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = mms_exact(d, phase, t_delta, x(i), t).T;
  return out;
}

/// Forcing J f with f = beta (T*_t + u T*_x) - k T*_xx, the residual of the
/// physical equation (the transformed equation is J times it).
template <typename Scalar>
Vector<Scalar> mms_source(const MmsDescriptor<Scalar>& d, Phase phase, Scalar time,
                          const MeshState<Scalar>& mesh, const MaterialProps<Scalar>& mat,
                          Scalar t_delta, Scalar velocity) {
  const Vector<Scalar> x = phase == Phase::Vapor ? mesh.physical_v() : mesh.physical_l();
  const Scalar J = phase == Phase::Vapor ? mesh.j_v : mesh.j_l;
  Vector<Scalar> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto e = mms_exact(d, phase, t_delta, x(i), time);
    out(i) = J * (mat.beta() * (e.T_t + velocity * e.T_x) - mat.k * e.T_xx);
  }
  return out;
}

/// Liquid velocity of the manufactured solution (exact interface speed in the mass relation).
template <typename Scalar>
Scalar mms_liquid_velocity(const MmsDescriptor<Scalar>& d, Scalar u_v, Scalar gamma, Scalar t) {
  return gamma * u_v + (Scalar(1) - gamma) * d.interface_velocity(t);
}

/// Interface-velocity correction for the free-interface variant, so that the
/// manufactured trajectory satisfies the latent-heat balance exactly.
template <typename Scalar>
Scalar mms_interface_correction(const MmsDescriptor<Scalar>& d, const MaterialProps<Scalar>& vapor,
                                const MaterialProps<Scalar>& liquid, Scalar t_delta,
                                Scalar h_lv, Scalar t) {
  const Scalar X = d.interface_position(t);
  const Scalar jump = liquid.k * mms_exact(d, Phase::Liquid, t_delta, X, t).T_x -
                      vapor.k * mms_exact(d, Phase::Vapor, t_delta, X, t).T_x;
  return d.interface_velocity(t) - jump / (vapor.rho * h_lv);
}

}  // namespace evap
