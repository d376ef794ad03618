#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evap/energy_monitor.hpp"
#include "evap/mms.hpp"
#include "evap/problem.hpp"
#include "evap/solver.hpp"

namespace evap {

/// Initial temperatures from the profile description (or the manufactured solution at t = 0).
template <typename Scalar>
SimState<Scalar> initial_state(const Problem<Scalar>& p) {
  const auto& s = p.solver;
  if (s.mms) {
    const Scalar xd = s.mms->interface_position(Scalar(0));
    const auto mesh = build_mesh(p.x0, p.xn, xd, s.n_v, s.n_l);
    return {mms_nodal(*s.mms, Phase::Vapor, p.t_delta, mesh.physical_v(), Scalar(0)),
            mms_nodal(*s.mms, Phase::Liquid, p.t_delta, mesh.physical_l(), Scalar(0)), xd,
            Scalar(0)};
  }
  const auto mesh = build_mesh(p.x0, p.xn, p.x_delta, s.n_v, s.n_l);

  // Distance from the interface, normalized so the profile hits the outer value exactly.
  auto shape = [](ProfileShape kind, Scalar width, Scalar dist, Scalar span) {
    if (kind == ProfileShape::Linear) return dist / span;
    return std::erf(dist / width) / std::erf(span / width);
  };
  SimState<Scalar> st;
  st.T_v.resize(s.n_v);
  st.T_l.resize(s.n_l);
  const Vector<Scalar> xv = mesh.physical_v();
  const Vector<Scalar> xl = mesh.physical_l();
  for (Eigen::Index i = 0; i < s.n_v; ++i) {
    st.T_v(i) = p.t_delta + (s.outer_bc_v - p.t_delta) *
                                shape(p.initial.vapor, p.initial.vapor_width, p.x_delta - xv(i),
                                      mesh.j_v);
  }
  for (Eigen::Index i = 0; i < s.n_l; ++i) {
    st.T_l(i) = p.t_delta + (s.outer_bc_l - p.t_delta) *
                                shape(p.initial.liquid, p.initial.liquid_width, xl(i) - p.x_delta,
                                      mesh.j_l);
  }
  // The interface nodes carry T_delta exactly.
  st.T_v(s.n_v - 1) = p.t_delta;
  st.T_l(0) = p.t_delta;
  st.x_delta = p.x_delta;
  st.time = 0;
  return st;
}

enum class RunStatus { Completed, PhaseDepleted, NumericalFailure };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::PhaseDepleted: return "phase_depleted";
    case RunStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

/// Emission cadence: step 0, every `every` steps, and the final step.
inline bool on_cadence(long step, long n_steps, long every) {
  return step % every == 0 || step == n_steps;
}

inline long cadence_count(long n_steps, long every) {
  return 1 + n_steps / every + (n_steps % every != 0 ? 1 : 0);
}

template <typename Scalar = double>
struct RunOptions {
  long snapshot_every = 1;
  bool audit = true;
  /// Called after every accepted step with (step, state).
  std::function<void(long, const SimState<Scalar>&)> on_step;
};

template <typename Scalar = double>
struct RunReport {
  RunStatus status = RunStatus::Completed;
  std::string message;
  long failed_step = -1;
  std::string failed_term;
  long failed_node = -1;

  Scalar dt{};
  long n_steps = 0;
  std::vector<SimState<Scalar>> snapshots;
  std::vector<InterfaceState<Scalar>> snapshot_interfaces;
  std::vector<EnergyLedger<Scalar>> ledger;

  SimState<Scalar> final_state;
  Scalar min_temperature{};
  Scalar max_temperature{};
  Scalar max_gcl_residual{};
  Scalar max_identity_residual{};
  Scalar max_closed_form_residual{};
  long audit_violations = 0;
  bool saw_dissipative = false;
  bool saw_bounded = false;

  bool ok() const { return status == RunStatus::Completed; }
};

/// Step count and the uniform step that lands exactly on t_end.
template <typename Scalar>
std::pair<long, Scalar> step_plan(Scalar t_end, Scalar dt) {
  if (t_end <= Scalar(0)) return {0, dt};
  const long n = std::max<long>(1, static_cast<long>(std::ceil(t_end / dt * (1 - 1e-12))));
  return {n, t_end / static_cast<Scalar>(n)};
}

/// Advances `start` from its own time to cfg.t_end with fixed-step RK4, recording snapshots and audits.
template <typename Scalar>
RunReport<Scalar> run_simulation(const Model<Scalar>& model, const SimState<Scalar>& start,
                                 const RunOptions<Scalar>& opts = {}) {
  RunReport<Scalar> rep;
  const auto& cfg = model.cfg;
  SimState<Scalar> state = start;
  rep.min_temperature = std::min(state.T_v.minCoeff(), state.T_l.minCoeff());
  rep.max_temperature = std::max(state.T_v.maxCoeff(), state.T_l.maxCoeff());

  long step = 0;
  auto fail = [&](RunStatus status, const std::string& msg, std::string term = {},
                  long node = -1) {
    rep.status = status;
    rep.message = msg;
    rep.failed_step = step;
    rep.failed_term = std::move(term);
    rep.failed_node = node;
  };

  auto record = [&](const SimState<Scalar>& s, long n_steps) {
    const bool snap = on_cadence(step, n_steps, std::max<long>(1, opts.snapshot_every));
    const bool aud = opts.audit && on_cadence(step, n_steps, cfg.audit_every);
    if (!snap && !aud) return;
    const auto rhs = assemble_rhs(s, model);
    if (snap) {
      rep.snapshots.push_back(s);
      rep.snapshot_interfaces.push_back(rhs.interface);
    }
    if (aud) {
      auto led = audit_step(s, rhs, model);
      rep.max_gcl_residual = std::max(rep.max_gcl_residual, led.gcl_residual);
      rep.max_identity_residual = std::max(rep.max_identity_residual, led.identity_residual);
      rep.max_closed_form_residual =
          std::max(rep.max_closed_form_residual, led.closed_form_residual);
      if (!led.ok()) ++rep.audit_violations;
      (led.regime == StrongRegime::Dissipative ? rep.saw_dissipative : rep.saw_bounded) = true;
      rep.ledger.push_back(std::move(led));
    }
  };

  try {
    Scalar dt = cfg.dt > Scalar(0) ? cfg.dt : stable_dt(state, model);
    const auto [n_steps, dt_used] = step_plan(cfg.t_end - start.time, dt);
    rep.dt = dt_used;
    rep.n_steps = n_steps;
    const Scalar margin = depletion_margin(model);

    record(state, n_steps);
    for (step = 1; step <= n_steps; ++step) {
      state = rk4_step(state, dt_used, model);
      if (step == n_steps) state.time = cfg.t_end;
      if (state.x_delta < model.x0 + margin || state.x_delta > model.xn - margin) {
        fail(RunStatus::PhaseDepleted,
             "interface reached x = " + std::to_string(static_cast<double>(state.x_delta)) +
                 ", within two cells of an outer boundary");
        break;
      }
      rep.min_temperature =
          std::min({rep.min_temperature, state.T_v.minCoeff(), state.T_l.minCoeff()});
      rep.max_temperature =
          std::max({rep.max_temperature, state.T_v.maxCoeff(), state.T_l.maxCoeff()});
      record(state, n_steps);
      if (opts.on_step) opts.on_step(step, state);
    }
    if (rep.ok()) step = n_steps;
  } catch (const PhaseDepletion& e) {
    fail(RunStatus::PhaseDepleted, e.what());
  } catch (const NumericalFailure& e) {
    fail(RunStatus::NumericalFailure, e.what(), e.term(), e.node());
  }
  rep.final_state = state;
  return rep;
}

}  // namespace evap
