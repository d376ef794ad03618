#pragma once

#include <string>
#include <utility>

#include "evap/errors.hpp"
#include "evap/sbp.hpp"

namespace evap {

/// Linear maps from the two reference intervals onto the moving physical phases.
///
///   vapor:  x(xi, tau)  = x0 + (x_delta - x0) xi,       xi  in [0, 1]
///   liquid: x(eta, tau) = x_delta + (xn - x_delta) eta, eta in [0, 1]
///
/// Both Jacobians are spatially uniform, and J xi_x = 1 holds by construction.
template <typename Scalar = double>
struct MeshState {
  Scalar x0{};
  Scalar xn{};
  Scalar x_delta{};
  Vector<Scalar> xi;
  Vector<Scalar> eta;
  Scalar j_v{};
  Scalar j_l{};
  Vector<Scalar> x_tau_v;
  Vector<Scalar> x_tau_l;

  Vector<Scalar> physical_v() const { return (x0 + j_v * xi.array()).matrix(); }
  Vector<Scalar> physical_l() const { return (x_delta + j_l * eta.array()).matrix(); }
};

template <typename Scalar>
MeshState<Scalar> build_mesh(Scalar x0, Scalar xn, Scalar x_delta, Eigen::Index n_v,
                             Eigen::Index n_l) {
  if (!(x0 < x_delta) || !(x_delta < xn)) {
    throw GeometryError("interface ordering violated: need x0 < x_delta < xn (x0=" +
                        std::to_string(static_cast<double>(x0)) +
                        ", x_delta=" + std::to_string(static_cast<double>(x_delta)) +
                        ", xn=" + std::to_string(static_cast<double>(xn)) + ")");
  }
  if (n_v < 2 || n_l < 2) throw ShapeError("build_mesh: each phase needs at least 2 nodes");
  MeshState<Scalar> m;
  m.x0 = x0;
  m.xn = xn;
  m.x_delta = x_delta;
  m.xi = Vector<Scalar>::LinSpaced(n_v, Scalar(0), Scalar(1));
  m.eta = Vector<Scalar>::LinSpaced(n_l, Scalar(0), Scalar(1));
  m.j_v = x_delta - x0;
  m.j_l = xn - x_delta;
  m.x_tau_v = Vector<Scalar>::Zero(n_v);
  m.x_tau_l = Vector<Scalar>::Zero(n_l);
  return m;
}

/// Nodal mesh velocity of both phases; the outer endpoints are stationary.
template <typename Scalar>
std::pair<Vector<Scalar>, Vector<Scalar>> mesh_velocity_field(const MeshState<Scalar>& mesh,
                                                              Scalar interface_velocity) {
  return {(mesh.xi * interface_velocity).eval(),
          ((Scalar(1) - mesh.eta.array()) * interface_velocity).matrix().eval()};
}

/// Time derivatives of the two (uniform) Jacobians.
template <typename Scalar>
std::pair<Scalar, Scalar> jacobian_rates(Scalar interface_velocity) {
  return {interface_velocity, -interface_velocity};
}

/// Max-norm residual of the discrete geometric conservation law
/// J_tau + D (J xi_t) with J xi_t = -x_tau, for each phase.
template <typename Scalar>
std::pair<Scalar, Scalar> gcl_residual(const MeshState<Scalar>& mesh,
                                       const Vector<Scalar>& x_tau_v,
                                       const Vector<Scalar>& x_tau_l, Scalar interface_velocity,
                                       const SbpOperator<Scalar>& op_v,
                                       const SbpOperator<Scalar>& op_l) {
  if (x_tau_v.size() != op_v.size() || x_tau_l.size() != op_l.size() ||
      mesh.xi.size() != op_v.size() || mesh.eta.size() != op_l.size()) {
    throw ShapeError("gcl_residual: mesh and operator sizes differ");
  }
  const auto [dj_v, dj_l] = jacobian_rates(interface_velocity);
  const Vector<Scalar> rv = (dj_v - apply_derivative(op_v, x_tau_v).array()).matrix();
  const Vector<Scalar> rl = (dj_l - apply_derivative(op_l, x_tau_l).array()).matrix();
  return {rv.cwiseAbs().maxCoeff(), rl.cwiseAbs().maxCoeff()};
}

template <typename Scalar>
std::pair<Scalar, Scalar> gcl_residual(const MeshState<Scalar>& mesh, Scalar interface_velocity,
                                       const SbpOperator<Scalar>& op_v,
                                       const SbpOperator<Scalar>& op_l) {
  const auto [xv, xl] = mesh_velocity_field(mesh, interface_velocity);
  return gcl_residual(mesh, xv, xl, interface_velocity, op_v, op_l);
}

}  // namespace evap
