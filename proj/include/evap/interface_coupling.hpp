#pragma once

#include <string>
#include <utility>

#include "evap/errors.hpp"
#include "evap/sbp.hpp"

namespace evap {

/// Interface quantities of one right-hand-side evaluation.
template <typename Scalar = double>
struct InterfaceState {
  Scalar flux_v{};       // k_v J_v^{-1} (D T_v) at the last vapor node
  Scalar flux_l{};       // k_l J_l^{-1} (D T_l) at the first liquid node
  Scalar u_tilde{};      // interface (mesh) velocity actually used
  Scalar u_tilde_flux{}; // (flux_l - flux_v) / (rho_v h_lv); equals u_tilde unless forced
  Scalar a_v_delta{};
  Scalar a_l_delta{};
  Scalar u_v_delta{};
  Scalar u_l_delta{};
};

/// The six SAT coefficients plus the free coupling parameter sigma >= 0.
template <typename Scalar = double>
struct PenaltySet {
  Scalar sigma_v1{}, sigma_l1{};
  Scalar sigma_v2{}, sigma_l2{};
  Scalar sigma_v3{}, sigma_l3{};
  Scalar sigma_free{};

  bool operator==(const PenaltySet&) const = default;
};

enum class StrongRegime { Dissipative, Bounded };

inline const char* to_string(StrongRegime r) {
  return r == StrongRegime::Dissipative ? "dissipative" : "bounded";
}

/// k j_inv (D T) at the requested boundary node.
template <typename Scalar>
Scalar boundary_flux(const Vector<Scalar>& T, const SbpOperator<Scalar>& op, Scalar k,
                     Scalar j_inv, Side side) {
  if (T.size() != op.size()) throw ShapeError("boundary_flux: length mismatch");
  const Eigen::Index b = op.boundary_index(side);
  return k * j_inv * op.apply_row(b, T);
}

/// Latent-heat balance: rho_v h_lv u = flux_l - flux_v.
template <typename Scalar>
Scalar mesh_velocity(Scalar flux_v, Scalar flux_l, Scalar rho_v, Scalar h_lv) {
  const Scalar denom = rho_v * h_lv;
  if (!(denom > Scalar(0))) throw ConfigError("mesh_velocity: rho_v * h_lv must be positive");
  return (flux_l - flux_v) / denom;
}

template <typename Scalar>
struct WaveSpeeds {
  Scalar a_v_delta;
  Scalar a_l_delta;
  Scalar u_l_delta;
};

/// Transformed speeds at the interface and the mass-conserving liquid velocity.
template <typename Scalar>
WaveSpeeds<Scalar> wave_speeds(Scalar u_v_delta, Scalar u_tilde, Scalar gamma) {
  const Scalar a_v = u_v_delta - u_tilde;
  return {a_v, gamma * a_v, gamma * u_v_delta + (Scalar(1) - gamma) * u_tilde};
}

/// Energy-stable penalty choice. The advective penalty sits on the phase whose
/// interface node is an outflow in the moving frame.
template <typename Scalar>
PenaltySet<Scalar> select_penalties(Scalar a_v_delta, Scalar beta_v, Scalar beta_l,
                                    Scalar gamma, Scalar k_v, Scalar k_l, Scalar j_v,
                                    Scalar j_l, Scalar sigma_free) {
  PenaltySet<Scalar> p;
  if (a_v_delta < Scalar(0)) {
    p.sigma_v1 = beta_v * a_v_delta;
  } else if (a_v_delta > Scalar(0)) {
    p.sigma_l1 = -beta_l * (gamma * a_v_delta);
  }
  p.sigma_v2 = -sigma_free / Scalar(2);
  p.sigma_l2 = -sigma_free / Scalar(2);
  p.sigma_v3 = -k_v / j_v;
  p.sigma_l3 = k_l / j_l;
  p.sigma_free = sigma_free;
  return p;
}

/// Interface penalty right-hand sides of both phases:
///   vapor:  P^{-1} [ s_v1 e_N (T_N - T_d) + s_v2 e_N (T_N - T_l0) + s_v3 D^T e_N (T_N - T_d) ]
///   liquid: P^{-1} [ s_l1 e_0 (T_0 - T_d) + s_l2 e_0 (T_0 - T_vN) + s_l3 D^T e_0 (T_0 - T_d) ]
template <typename Scalar>
std::pair<Vector<Scalar>, Vector<Scalar>> sat_contribution(const Vector<Scalar>& T_v,
                                                           const Vector<Scalar>& T_l,
                                                           Scalar t_delta,
                                                           const PenaltySet<Scalar>& pen,
                                                           const SbpOperator<Scalar>& op_v,
                                                           const SbpOperator<Scalar>& op_l) {
  if (T_v.size() != op_v.size() || T_l.size() != op_l.size()) {
    throw ShapeError("sat_contribution: length mismatch");
  }
  const Eigen::Index nv = op_v.size() - 1;
  const Scalar tv = T_v(nv);
  const Scalar tl = T_l(0);

  Vector<Scalar> sat_v = pen.sigma_v3 * (tv - t_delta) * op_v.D().row(nv).transpose();
  sat_v(nv) += pen.sigma_v1 * (tv - t_delta) + pen.sigma_v2 * (tv - tl);
  sat_v.array() /= op_v.P().array();

  Vector<Scalar> sat_l = pen.sigma_l3 * (tl - t_delta) * op_l.D().row(0).transpose();
  sat_l(0) += pen.sigma_l1 * (tl - t_delta) + pen.sigma_l2 * (tl - tv);
  sat_l.array() /= op_l.P().array();

  return {std::move(sat_v), std::move(sat_l)};
}

/// Strong interface treatment: dissipative iff a_v < 0 and u_tilde >= 0.
template <typename Scalar>
StrongRegime classify_strong_regime(Scalar a_v_delta, Scalar u_tilde) {
  return (a_v_delta < Scalar(0) && u_tilde >= Scalar(0)) ? StrongRegime::Dissipative
                                                        : StrongRegime::Bounded;
}

}  // namespace evap
