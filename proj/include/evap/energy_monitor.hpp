#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "evap/errors.hpp"
#include "evap/interface_coupling.hpp"
#include "evap/moving_mesh.hpp"
#include "evap/problem.hpp"
#include "evap/sbp.hpp"
#include "evap/solver.hpp"

namespace evap {

/// Tolerances certified by the auditor.
inline constexpr double kClosedFormTolerance = 1e-10;
inline constexpr double kIdentityTolerance = 1e-9;
inline constexpr double kGclTolerance = 1e-12;

/// Every term of the discrete energy balance at one audited state.
template <typename Scalar = double>
struct EnergyLedger {
  Scalar time{};
  Scalar energy{};
  Scalar dissipation{};  // already doubled: 2 k ||J^{-1} D T||^2_{JP} summed over phases
  Scalar it_direct{};
  Scalar sat_direct{};
  Scalar itsat_closed{};
  Scalar bt_outer{};
  Scalar source_term{};  // manufactured forcing, zero outside MMS runs
  Scalar rate_measured{};
  Scalar grad_term{};
  Scalar pval_term{};
  Scalar pval_coupling{};
  Scalar pval_vapor{};
  Scalar pval_liquid{};
  Scalar gcl_residual{};
  Scalar identity_residual{};     // relative to the largest term of the balance
  Scalar closed_form_residual{};  // relative to max(1, |itsat_closed|)
  Scalar rate_bound{};            // data-only upper bound on the energy rate
  StrongRegime regime = StrongRegime::Bounded;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Interface-node values entering IT and SAT.
template <typename Scalar = double>
struct InterfaceSample {
  Scalar T_v{};   // vapor value at its last node
  Scalar T_l{};   // liquid value at its first node
  Scalar dT_v{};  // (D T_v) at the last node
  Scalar dT_l{};  // (D T_l) at the first node
  Scalar a_v{};   // nodal transformed speeds there
  Scalar a_l{};
};

template <typename Scalar = double>
struct PhaseCoefficients {
  Scalar beta_v{}, beta_l{};
  Scalar k_v{}, k_l{};
  Scalar j_v{}, j_l{};
};

template <typename Scalar>
InterfaceSample<Scalar> sample_interface(const Vector<Scalar>& T_v, const Vector<Scalar>& T_l,
                                         Scalar a_v_node, Scalar a_l_node,
                                         const SbpOperator<Scalar>& op_v,
                                         const SbpOperator<Scalar>& op_l) {
  const Eigen::Index nv = op_v.size() - 1;
  return {T_v(nv), T_l(0), op_v.apply_row(nv, T_v), op_l.apply_row(0, T_l), a_v_node,
          a_l_node};
}

template <typename Scalar>
Scalar discrete_energy(const Vector<Scalar>& T_v, const Vector<Scalar>& T_l, Scalar j_v,
                       Scalar j_l, Scalar beta_v, Scalar beta_l, const SbpOperator<Scalar>& op_v,
                       const SbpOperator<Scalar>& op_l) {
  return beta_v * j_v * quadrature(op_v, T_v, T_v) + beta_l * j_l * quadrature(op_l, T_l, T_l);
}

template <typename Scalar>
Scalar discrete_dissipation(const Vector<Scalar>& T_v, const Vector<Scalar>& T_l,
                            const PhaseCoefficients<Scalar>& c, const SbpOperator<Scalar>& op_v,
                            const SbpOperator<Scalar>& op_l) {
  const Vector<Scalar> gv = apply_derivative(op_v, T_v);
  const Vector<Scalar> gl = apply_derivative(op_l, T_l);
  return Scalar(2) * c.k_v / c.j_v * quadrature(op_v, gv, gv) +
         Scalar(2) * c.k_l / c.j_l * quadrature(op_l, gl, gl);
}

/// Interface term: the four interface-node products of the energy method.
template <typename Scalar>
Scalar it_direct(const InterfaceSample<Scalar>& s, const PhaseCoefficients<Scalar>& c) {
  return -c.beta_v * s.T_v * s.a_v * s.T_v + Scalar(2) * c.k_v * s.T_v * s.dT_v / c.j_v +
         c.beta_l * s.T_l * s.a_l * s.T_l - Scalar(2) * c.k_l * s.T_l * s.dT_l / c.j_l;
}

/// Energy contribution of the interface penalties, evaluated from the penalty formulas.
template <typename Scalar>
Scalar sat_direct(const InterfaceSample<Scalar>& s, const PenaltySet<Scalar>& p,
                  Scalar t_delta) {
  const Scalar sat_v = p.sigma_v1 * s.T_v * (s.T_v - t_delta) +
                       p.sigma_v2 * s.T_v * (s.T_v - s.T_l) +
                       p.sigma_v3 * s.dT_v * (s.T_v - t_delta);
  const Scalar sat_l = p.sigma_l1 * s.T_l * (s.T_l - t_delta) +
                       p.sigma_l2 * s.T_l * (s.T_l - s.T_v) +
                       p.sigma_l3 * s.dT_l * (s.T_l - t_delta);
  return Scalar(2) * (sat_v + sat_l);
}

/// IT + SAT after the penalty choice, in closed form. The branch follows the sign of a_v.
template <typename Scalar>
Scalar itsat_closed_form(Scalar T_v, Scalar T_l, Scalar t_delta, Scalar a_v_delta,
                         Scalar a_l_delta, Scalar beta_v, Scalar beta_l, Scalar u_tilde,
                         Scalar c1, Scalar sigma_free) {
  const Scalar td2 = t_delta * t_delta;
  const Scalar dvl = T_v - T_l;
  Scalar value = (beta_l * a_l_delta - beta_v * a_v_delta) * td2 - c1 * u_tilde -
                 sigma_free * dvl * dvl;
  if (a_v_delta < Scalar(0)) {
    const Scalar dvd = T_v - t_delta;
    value += beta_v * a_v_delta * dvd * dvd + beta_l * a_l_delta * (T_l * T_l - td2);
  } else if (a_v_delta > Scalar(0)) {
    const Scalar dld = T_l - t_delta;
    value += -beta_l * a_l_delta * dld * dld - beta_v * a_v_delta * (T_v * T_v - td2);
  }
  return value;
}

/// Largest value IT + SAT can take for given data: drops the non-positive
/// difference terms and bounds the remaining quadratic by its T_delta^2 part.
template <typename Scalar>
Scalar interface_data_envelope(Scalar t_delta, Scalar a_v_delta, Scalar a_l_delta,
                               Scalar beta_v, Scalar beta_l, Scalar u_tilde, Scalar c1) {
  const Scalar td2 = t_delta * t_delta;
  Scalar extra = 0;
  if (a_v_delta < Scalar(0)) extra = std::abs(beta_l * a_l_delta) * td2;
  if (a_v_delta > Scalar(0)) extra = beta_v * a_v_delta * td2;
  return (beta_l * a_l_delta - beta_v * a_v_delta) * td2 - c1 * u_tilde + extra;
}

template <typename Scalar>
struct GradPval {
  Scalar grad{};
  Scalar pval{};
  Scalar pval_coupling{};  // -sigma (T_v - T_l)^2
  Scalar pval_vapor{};
  Scalar pval_liquid{};
};

/// Gradient and point-value groupings of IT + SAT.
///
/// Requires the transposed-derivative penalties to cancel the interface
/// conduction terms (sigma_v3 = -k_v/J_v, sigma_l3 = k_l/J_l) and equal
/// coupling penalties; otherwise the grouping does not exist and this throws.
template <typename Scalar>
GradPval<Scalar> grad_pval_diagnostics(const InterfaceSample<Scalar>& s,
                                       const PenaltySet<Scalar>& p,
                                       const PhaseCoefficients<Scalar>& c, Scalar t_delta) {
  auto close = [](Scalar a, Scalar b) {
    return std::abs(a - b) <= Scalar(1e-12) * std::max(Scalar(1), std::max(std::abs(a), std::abs(b)));
  };
  if (!close(p.sigma_v3, -c.k_v / c.j_v)) {
    throw ConfigError("grad_pval_diagnostics: sigma_v3 must equal -k_v/J_v");
  }
  if (!close(p.sigma_l3, c.k_l / c.j_l)) {
    throw ConfigError("grad_pval_diagnostics: sigma_l3 must equal k_l/J_l");
  }
  if (!close(p.sigma_v2, p.sigma_l2)) {
    throw ConfigError("grad_pval_diagnostics: sigma_v2 must equal sigma_l2");
  }

  GradPval<Scalar> out;
  out.grad = Scalar(2) * t_delta * (c.k_v * s.dT_v / c.j_v - c.k_l * s.dT_l / c.j_l);

  // Full 3x3 form in (T_v, T_l, T_delta).
  Eigen::Matrix<Scalar, 3, 3> m;
  m << -c.beta_v * s.a_v + Scalar(2) * (p.sigma_v1 + p.sigma_v2), -(p.sigma_v2 + p.sigma_l2),
      -p.sigma_v1,  //
      -(p.sigma_v2 + p.sigma_l2), c.beta_l * s.a_l + Scalar(2) * (p.sigma_l1 + p.sigma_l2),
      -p.sigma_l1,  //
      -p.sigma_v1, -p.sigma_l1, Scalar(0);
  const Eigen::Matrix<Scalar, 3, 1> v(s.T_v, s.T_l, t_delta);
  out.pval = v.dot(m * v);

  const Scalar sigma = -Scalar(2) * p.sigma_v2;
  const Scalar dvl = s.T_v - s.T_l;
  out.pval_coupling = -sigma * dvl * dvl;
  out.pval_vapor = (-c.beta_v * s.a_v + Scalar(2) * p.sigma_v1) * s.T_v * s.T_v -
                   Scalar(2) * p.sigma_v1 * s.T_v * t_delta;
  out.pval_liquid = (c.beta_l * s.a_l + Scalar(2) * p.sigma_l1) * s.T_l * s.T_l -
                    Scalar(2) * p.sigma_l1 * s.T_l * t_delta;
  return out;
}

/// Outer-boundary energy: the boundary terms of the energy method at xi = 0 and
/// eta = 1 plus the outer penalty contributions.
template <typename Scalar>
Scalar outer_boundary_energy(const Vector<Scalar>& T_v, const Vector<Scalar>& T_l, Scalar a_v0,
                             Scalar a_lN, Scalar bc_v, Scalar bc_l,
                             const PhaseCoefficients<Scalar>& c, Scalar c_stab,
                             const SbpOperator<Scalar>& op_v, const SbpOperator<Scalar>& op_l) {
  const Eigen::Index nl = op_l.size() - 1;
  const Scalar tv = T_v(0);
  const Scalar gv = op_v.apply_row(0, T_v);
  const Scalar tl = T_l(nl);
  const Scalar gl = op_l.apply_row(nl, T_l);
  const auto pv = outer_penalty(c.beta_v, a_v0, c.k_v, Scalar(1) / c.j_v, op_v.spacing(),
                                Side::First, c_stab);
  const auto pl = outer_penalty(c.beta_l, a_lN, c.k_l, Scalar(1) / c.j_l, op_l.spacing(),
                                Side::Last, c_stab);
  const Scalar vapor = c.beta_v * a_v0 * tv * tv - Scalar(2) * c.k_v / c.j_v * tv * gv +
                       Scalar(2) * pv.tau0 * tv * (tv - bc_v) +
                       Scalar(2) * pv.tau1 * gv * (tv - bc_v);
  const Scalar liquid = -c.beta_l * a_lN * tl * tl + Scalar(2) * c.k_l / c.j_l * tl * gl +
                        Scalar(2) * pl.tau0 * tl * (tl - bc_l) +
                        Scalar(2) * pl.tau1 * gl * (tl - bc_l);
  return vapor + liquid;
}

/// Data-only bound on one outer boundary's energy contribution after borrowing
/// the boundary node's share P_b 2 k/J (D T)_b^2 of the dissipation.
template <typename Scalar>
Scalar outer_data_bound(Scalar bc, Scalar beta, Scalar a, Scalar k, Scalar j, Scalar p_b,
                        Scalar spacing, Side side, Scalar c_stab) {
  const auto pen = outer_penalty(beta, a, k, Scalar(1) / j, spacing, side, c_stab);
  const Scalar sign = side == Side::First ? Scalar(1) : Scalar(-1);
  const Scalar m = -(sign * beta * a + Scalar(2) * pen.tau0);
  Scalar bound = k / j * bc * bc / (Scalar(2) * p_b);
  if (m > Scalar(0)) {
    bound += pen.tau0 * pen.tau0 * bc * bc / m;
  } else if (bc != Scalar(0)) {
    bound = std::numeric_limits<Scalar>::infinity();
  }
  return bound;
}

/// 2 T^T P J dT + J_tau T^T P T per phase, weighted by beta: the exact time
/// derivative of the discrete energy along the assembled dynamics.
template <typename Scalar>
Scalar energy_rate(const SimState<Scalar>& state, const RhsOutput<Scalar>& rhs,
                   const Model<Scalar>& model) {
  const Scalar bv = model.vapor.beta();
  const Scalar bl = model.liquid.beta();
  return Scalar(2) * bv * rhs.mesh.j_v * quadrature(model.op_v, state.T_v, rhs.dT_v) +
         bv * rhs.dj_v * quadrature(model.op_v, state.T_v, state.T_v) +
         Scalar(2) * bl * rhs.mesh.j_l * quadrature(model.op_l, state.T_l, rhs.dT_l) +
         bl * rhs.dj_l * quadrature(model.op_l, state.T_l, state.T_l);
}

/// Secondary check of rate_measured from three audits one step apart: the energy
/// change against Simpson's rule on the rates. Shrinks like dt^5 under RK4.
template <typename Scalar>
Scalar simpson_rate_gap(const EnergyLedger<Scalar>& a, const EnergyLedger<Scalar>& b,
                        const EnergyLedger<Scalar>& c) {
  const Scalar h = (c.time - a.time) / Scalar(2);
  return std::abs(c.energy - a.energy -
                  h / Scalar(3) * (a.rate_measured + Scalar(4) * b.rate_measured + c.rate_measured));
}

/// Fills every ledger field for `state` and checks the certified identities.
template <typename Scalar>
EnergyLedger<Scalar> audit_step(const SimState<Scalar>& state, const RhsOutput<Scalar>& rhs,
                                const Model<Scalar>& model) {
  const auto& op_v = model.op_v;
  const auto& op_l = model.op_l;
  const auto& itf = rhs.interface;
  const PhaseCoefficients<Scalar> coef{model.vapor.beta(), model.liquid.beta(), model.vapor.k,
                                       model.liquid.k,     rhs.mesh.j_v,        rhs.mesh.j_l};
  const Scalar t_delta = model.iphys.t_delta;

  EnergyLedger<Scalar> led;
  led.time = state.time;
  led.energy = discrete_energy(state.T_v, state.T_l, rhs.mesh.j_v, rhs.mesh.j_l, coef.beta_v,
                               coef.beta_l, op_v, op_l);
  led.dissipation = discrete_dissipation(state.T_v, state.T_l, coef, op_v, op_l);

  const auto s = sample_interface(state.T_v, state.T_l, rhs.a_v(op_v.size() - 1), rhs.a_l(0),
                                  op_v, op_l);
  led.it_direct = it_direct(s, coef);
  led.sat_direct = sat_direct(s, rhs.penalties, t_delta);
  led.itsat_closed = itsat_closed_form(s.T_v, s.T_l, t_delta, itf.a_v_delta, itf.a_l_delta,
                                       coef.beta_v, coef.beta_l, itf.u_tilde_flux,
                                       model.iphys.c1, rhs.penalties.sigma_free);
  led.bt_outer = outer_boundary_energy(state.T_v, state.T_l, rhs.a_v(0),
                                       rhs.a_l(op_l.size() - 1), rhs.bc_v, rhs.bc_l, coef,
                                       model.cfg.c_stab, op_v, op_l);
  led.source_term = Scalar(2) * quadrature(op_v, state.T_v, rhs.source_v) +
                    Scalar(2) * quadrature(op_l, state.T_l, rhs.source_l);
  led.rate_measured = energy_rate(state, rhs, model);

  const auto gp = grad_pval_diagnostics(s, rhs.penalties, coef, t_delta);
  led.grad_term = gp.grad;
  led.pval_term = gp.pval;
  led.pval_coupling = gp.pval_coupling;
  led.pval_vapor = gp.pval_vapor;
  led.pval_liquid = gp.pval_liquid;

  const auto [gv, gl] =
      gcl_residual(rhs.mesh, rhs.mesh.x_tau_v, rhs.mesh.x_tau_l, itf.u_tilde, op_v, op_l);
  led.gcl_residual = std::max(gv, gl);
  led.regime = classify_strong_regime(itf.a_v_delta, itf.u_tilde);

  led.rate_bound =
      interface_data_envelope(t_delta, itf.a_v_delta, itf.a_l_delta, coef.beta_v, coef.beta_l,
                              itf.u_tilde_flux, model.iphys.c1) +
      outer_data_bound(rhs.bc_v, coef.beta_v, rhs.a_v(0), coef.k_v, coef.j_v, op_v.P()(0),
                       op_v.spacing(), Side::First, model.cfg.c_stab) +
      outer_data_bound(rhs.bc_l, coef.beta_l, rhs.a_l(op_l.size() - 1), coef.k_l, coef.j_l,
                       op_l.P()(op_l.size() - 1), op_l.spacing(), Side::Last, model.cfg.c_stab);

  const Scalar balance = led.rate_measured + led.dissipation - led.it_direct - led.sat_direct -
                         led.bt_outer - led.source_term;
  const Scalar scale = std::max(
      {std::abs(led.rate_measured), led.dissipation, std::abs(led.it_direct),
       std::abs(led.sat_direct), std::abs(led.bt_outer), std::abs(led.source_term),
       std::numeric_limits<Scalar>::min()});
  led.identity_residual = std::abs(balance) / scale;
  led.closed_form_residual = std::abs(led.it_direct + led.sat_direct - led.itsat_closed) /
                             std::max(Scalar(1), std::abs(led.itsat_closed));

  auto flag = [&](bool bad, const std::string& what) {
    if (bad) led.violations.push_back(what);
  };
  flag(!(led.energy >= Scalar(0)), "energy is negative");
  flag(!(led.dissipation >= Scalar(0)), "dissipation is negative");
  flag(!(led.closed_form_residual <= Scalar(kClosedFormTolerance)),
       "IT + SAT differs from its closed form (relative residual " +
           std::to_string(static_cast<double>(led.closed_form_residual)) + ")");
  flag(!(led.identity_residual <= Scalar(kIdentityTolerance)),
       "energy-rate identity violated (relative residual " +
           std::to_string(static_cast<double>(led.identity_residual)) + ")");
  flag(!(led.gcl_residual <= Scalar(kGclTolerance)),
       "geometric conservation law residual " +
           std::to_string(static_cast<double>(led.gcl_residual)));
  return led;
}

}  // namespace evap
