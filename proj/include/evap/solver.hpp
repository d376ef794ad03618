#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "evap/errors.hpp"
#include "evap/interface_coupling.hpp"
#include "evap/mms.hpp"
#include "evap/moving_mesh.hpp"
#include "evap/problem.hpp"
#include "evap/sbp.hpp"

namespace evap {

template <typename Scalar = double>
struct SimState {
  Vector<Scalar> T_v;
  Vector<Scalar> T_l;
  Scalar x_delta{};
  Scalar time{};
};

template <typename Scalar = double>
struct RhsOutput {
  Vector<Scalar> dT_v;
  Vector<Scalar> dT_l;
  Scalar dx_delta{};
  InterfaceState<Scalar> interface;
  PenaltySet<Scalar> penalties;

  // Quantities the energy auditor needs from the same evaluation.
  MeshState<Scalar> mesh;  // includes the nodal mesh velocities
  Scalar dj_v{};
  Scalar dj_l{};
  Vector<Scalar> a_v;  // nodal transformed speeds
  Vector<Scalar> a_l;
  Scalar bc_v{};
  Scalar bc_l{};
  Vector<Scalar> source_v;  // manufactured forcing J f (zero outside MMS runs)
  Vector<Scalar> source_l;
};

/// Coefficients of the weak outer Dirichlet condition.
template <typename Scalar>
struct OuterPenalty {
  Scalar tau0;  // point-value penalty
  Scalar tau1;  // transposed-derivative penalty
};

template <typename Scalar>
OuterPenalty<Scalar> outer_penalty(Scalar beta, Scalar a_boundary, Scalar k, Scalar j_inv,
                                   Scalar spacing, Side side, Scalar c_stab = Scalar(1)) {
  const Scalar tau0 = -(std::abs(a_boundary) * beta / Scalar(2) + c_stab * k * j_inv / spacing);
  // tau1 cancels the boundary conduction term k j_inv T (D T) of the energy rate.
  const Scalar tau1 = side == Side::First ? k * j_inv : -k * j_inv;
  return {tau0, tau1};
}

/// P^{-1} [ tau0 E (T - g) + tau1 D^T E (T - g) ] at one outer boundary.
template <typename Scalar>
Vector<Scalar> outer_bc_sat(const Vector<Scalar>& T, Scalar bc_value,
                            const SbpOperator<Scalar>& op, Scalar beta, Scalar a_boundary,
                            Scalar k, Scalar j_inv, Side side, Scalar c_stab = Scalar(1)) {
  if (T.size() != op.size()) throw ShapeError("outer_bc_sat: length mismatch");
  const auto pen = outer_penalty(beta, a_boundary, k, j_inv, op.spacing(), side, c_stab);
  const Eigen::Index b = op.boundary_index(side);
  const Scalar mismatch = T(b) - bc_value;
  Vector<Scalar> out = (pen.tau1 * mismatch) * op.D().row(b).transpose();
  out(b) += pen.tau0 * mismatch;
  out.array() /= op.P().array();
  return out;
}

namespace detail {

template <typename Scalar>
void require_finite(const Vector<Scalar>& v, const char* term, Phase phase) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(static_cast<double>(v(i)))) {
      const std::string name =
          std::string(phase == Phase::Vapor ? "vapor " : "liquid ") + term;
      throw NumericalFailure(name, static_cast<long>(i),
                             "non-finite value in " + name + " at node " + std::to_string(i));
    }
  }
}

template <typename Scalar>
void require_finite(Scalar v, const char* term) {
  if (!std::isfinite(static_cast<double>(v))) {
    throw NumericalFailure(term, -1, std::string("non-finite value in ") + term);
  }
}

}  // namespace detail

/// Semi-discrete right-hand side of the coupled split-form system.
///
/// Per phase (vapor shown; liquid mirrors it with E_0 and eta):
///   beta/2 ((J T)_tau + J T_tau + D A T + A D T) = k D(J^{-1} D T) + SAT_interface + SAT_outer
/// With J uniform, (J T)_tau + J T_tau = J_tau T + 2 J T_tau, which is solved for T_tau.
template <typename Scalar>
RhsOutput<Scalar> assemble_rhs(const SimState<Scalar>& state, const Model<Scalar>& model) {
  const auto& cfg = model.cfg;
  const auto& op_v = model.op_v;
  const auto& op_l = model.op_l;
  if (state.T_v.size() != op_v.size() || state.T_l.size() != op_l.size()) {
    throw ShapeError("assemble_rhs: state does not match the discretization");
  }
  detail::require_finite(state.x_delta, "x_delta");
  detail::require_finite(state.T_v, "temperature", Phase::Vapor);
  detail::require_finite(state.T_l, "temperature", Phase::Liquid);

  RhsOutput<Scalar> out;
  try {
    out.mesh = build_mesh(model.x0, model.xn, state.x_delta, op_v.size(), op_l.size());
  } catch (const GeometryError& e) {
    throw PhaseDepletion(e.what());
  }
  auto& mesh = out.mesh;
  const Scalar jv_inv = Scalar(1) / mesh.j_v;
  const Scalar jl_inv = Scalar(1) / mesh.j_l;
  const Scalar beta_v = model.vapor.beta();
  const Scalar beta_l = model.liquid.beta();
  const Scalar gamma = model.iphys.gamma;
  const Scalar t_delta = model.iphys.t_delta;

  // (1)-(2) interface fluxes and the latent-heat interface velocity
  auto& itf = out.interface;
  itf.flux_v = boundary_flux(state.T_v, op_v, model.vapor.k, jv_inv, Side::Last);
  itf.flux_l = boundary_flux(state.T_l, op_l, model.liquid.k, jl_inv, Side::First);
  itf.u_tilde_flux = mesh_velocity(itf.flux_v, itf.flux_l, model.iphys.rho_v, model.iphys.h_lv);
  itf.u_tilde = itf.u_tilde_flux;
  if (cfg.mms) {
    using Mode = typename MmsDescriptor<Scalar>::InterfaceMode;
    if (cfg.mms->interface_mode == Mode::Prescribed) {
      itf.u_tilde = cfg.mms->interface_velocity(state.time);
    } else {
      itf.u_tilde += mms_interface_correction(*cfg.mms, model.vapor, model.liquid, t_delta,
                                              model.iphys.h_lv, state.time);
    }
  }
  detail::require_finite(itf.u_tilde, "interface velocity");

  // (3) mesh velocity and Jacobian rates
  std::tie(mesh.x_tau_v, mesh.x_tau_l) = mesh_velocity_field(mesh, itf.u_tilde);
  std::tie(out.dj_v, out.dj_l) = jacobian_rates(itf.u_tilde);

  // (4) transformed speeds a = u - x_tau; u_l is uniform and slaved to mass conservation
  const auto ws = wave_speeds(cfg.u_v, itf.u_tilde, gamma);
  itf.u_v_delta = cfg.u_v;
  itf.a_v_delta = ws.a_v_delta;
  itf.a_l_delta = ws.a_l_delta;
  itf.u_l_delta = ws.u_l_delta;
  out.a_v = (cfg.u_v - mesh.x_tau_v.array()).matrix();
  out.a_l = (ws.u_l_delta - mesh.x_tau_l.array()).matrix();

  // (5) penalties
  out.penalties = select_penalties(itf.a_v_delta, beta_v, beta_l, gamma, model.vapor.k,
                                   model.liquid.k, mesh.j_v, mesh.j_l, cfg.sigma_free);

  // (6) spatial terms
  const Vector<Scalar> dTv = apply_derivative(op_v, state.T_v);
  const Vector<Scalar> dTl = apply_derivative(op_l, state.T_l);

  const Vector<Scalar> adv_v =
      (beta_v / Scalar(2)) *
      (apply_derivative(op_v, out.a_v.cwiseProduct(state.T_v)) + out.a_v.cwiseProduct(dTv));
  const Vector<Scalar> adv_l =
      (beta_l / Scalar(2)) *
      (apply_derivative(op_l, out.a_l.cwiseProduct(state.T_l)) + out.a_l.cwiseProduct(dTl));
  const Vector<Scalar> diff_v = (model.vapor.k * jv_inv) * apply_derivative(op_v, dTv);
  const Vector<Scalar> diff_l = (model.liquid.k * jl_inv) * apply_derivative(op_l, dTl);

  const auto [sat_v, sat_l] =
      sat_contribution(state.T_v, state.T_l, t_delta, out.penalties, op_v, op_l);

  out.bc_v = cfg.outer_bc_v;
  out.bc_l = cfg.outer_bc_l;
  out.source_v = Vector<Scalar>::Zero(op_v.size());
  out.source_l = Vector<Scalar>::Zero(op_l.size());
  if (cfg.mms) {
    const auto& d = *cfg.mms;
    out.bc_v = mms_exact(d, Phase::Vapor, t_delta, model.x0, state.time).T;
    out.bc_l = mms_exact(d, Phase::Liquid, t_delta, model.xn, state.time).T;
    const Scalar u_l_exact = mms_liquid_velocity(d, cfg.u_v, gamma, state.time);
    out.source_v = mms_source(d, Phase::Vapor, state.time, mesh, model.vapor, t_delta, cfg.u_v);
    out.source_l = mms_source(d, Phase::Liquid, state.time, mesh, model.liquid, t_delta, u_l_exact);
  }

  const Vector<Scalar> outer_v =
      outer_bc_sat(state.T_v, out.bc_v, op_v, beta_v, out.a_v(0), model.vapor.k, jv_inv,
                   Side::First, cfg.c_stab);
  const Vector<Scalar> outer_l =
      outer_bc_sat(state.T_l, out.bc_l, op_l, beta_l, out.a_l(op_l.size() - 1), model.liquid.k,
                   jl_inv, Side::Last, cfg.c_stab);

  detail::require_finite(adv_v, "advection", Phase::Vapor);
  detail::require_finite(adv_l, "advection", Phase::Liquid);
  detail::require_finite(diff_v, "diffusion", Phase::Vapor);
  detail::require_finite(diff_l, "diffusion", Phase::Liquid);
  detail::require_finite(sat_v, "interface SAT", Phase::Vapor);
  detail::require_finite(sat_l, "interface SAT", Phase::Liquid);
  detail::require_finite(outer_v, "outer SAT", Phase::Vapor);
  detail::require_finite(outer_l, "outer SAT", Phase::Liquid);

  // (7) solve the split time term for T_tau
  out.dT_v = (-adv_v + diff_v + sat_v + outer_v + out.source_v -
              (beta_v / Scalar(2)) * out.dj_v * state.T_v) /
             (beta_v * mesh.j_v);
  out.dT_l = (-adv_l + diff_l + sat_l + outer_l + out.source_l -
              (beta_l / Scalar(2)) * out.dj_l * state.T_l) /
             (beta_l * mesh.j_l);
  detail::require_finite(out.dT_v, "time derivative", Phase::Vapor);
  detail::require_finite(out.dT_l, "time derivative", Phase::Liquid);

  // (8)
  out.dx_delta = itf.u_tilde;
  return out;
}

/// Classical four-stage Runge-Kutta step for y' = f(t, y); Y is a scalar or an Eigen vector.
template <typename Y, typename Scalar, typename F>
Y rk4_step(const Y& y, Scalar t, Scalar dt, F&& f) {
  const Scalar half = dt / Scalar(2);
  const Y k1 = f(t, y);
  const Y k2 = f(t + half, Y(y + half * k1));
  const Y k3 = f(t + half, Y(y + half * k2));
  const Y k4 = f(t + dt, Y(y + dt * k3));
  return Y(y + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4));
}

namespace detail {

template <typename Scalar>
Vector<Scalar> pack(const SimState<Scalar>& s) {
  Vector<Scalar> y(s.T_v.size() + s.T_l.size() + 1);
  y << s.T_v, s.T_l, s.x_delta;
  return y;
}

template <typename Scalar>
SimState<Scalar> unpack(const Vector<Scalar>& y, Eigen::Index n_v, Eigen::Index n_l,
                        Scalar time) {
  return {y.head(n_v), y.segment(n_v, n_l), y(n_v + n_l), time};
}

}  // namespace detail

/// One RK4 step of (T_v, T_l, x_delta). Every stage rebuilds the mesh from its own x_delta.
template <typename Scalar>
SimState<Scalar> rk4_step(const SimState<Scalar>& state, Scalar dt, const Model<Scalar>& model) {
  if (!(dt > Scalar(0))) throw ConfigError("rk4_step: dt must be positive");
  const Eigen::Index n_v = state.T_v.size();
  const Eigen::Index n_l = state.T_l.size();
  auto f = [&](Scalar t, const Vector<Scalar>& y) {
    const auto rhs = assemble_rhs(detail::unpack(y, n_v, n_l, t), model);
    Vector<Scalar> dy(n_v + n_l + 1);
    dy << rhs.dT_v, rhs.dT_l, rhs.dx_delta;
    return dy;
  };
  const Vector<Scalar> y = rk4_step(detail::pack(state), state.time, dt, f);
  auto next = detail::unpack(y, n_v, n_l, state.time + dt);
  if (!y.allFinite()) throw NumericalFailure("state", -1, "non-finite state after RK4 step");
  return next;
}

/// Conservative explicit step bound C * min(h^2 J^2 beta / k, h J / |a|) over both phases.
template <typename Scalar>
Scalar stable_dt(const SimState<Scalar>& state, const Model<Scalar>& model) {
  const auto rhs = assemble_rhs(state, model);
  Scalar bound = std::numeric_limits<Scalar>::infinity();
  auto phase = [&](const MaterialProps<Scalar>& m, Scalar h, Scalar J, const Vector<Scalar>& a) {
    bound = std::min(bound, h * h * J * J * m.beta() / m.k);
    const Scalar amax = a.cwiseAbs().maxCoeff();
    if (amax > Scalar(0)) bound = std::min(bound, h * J / amax);
  };
  phase(model.vapor, model.op_v.spacing(), rhs.mesh.j_v, rhs.a_v);
  phase(model.liquid, model.op_l.spacing(), rhs.mesh.j_l, rhs.a_l);
  return model.cfg.cfl * bound;
}

/// Interface positions closer than two mean cells to an outer wall stop the run.
template <typename Scalar>
Scalar depletion_margin(const Model<Scalar>& model) {
  const auto cells = static_cast<Scalar>(model.op_v.size() + model.op_l.size() - 2);
  return Scalar(2) * (model.xn - model.x0) / cells;
}

}  // namespace evap
