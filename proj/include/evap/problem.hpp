#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "evap/errors.hpp"
#include "evap/physics.hpp"
#include "evap/sbp.hpp"

namespace evap {

/// Manufactured solution
///   T*(x, t) = T_delta + A (x - X(t)) cos(kappa x - omega t + phi)   per phase,
///   X(t)     = x_mean + x_amplitude sin(x_frequency t).
/// T* equals T_delta on the interface by construction, so the interface
/// conditions hold exactly for any parameters.
template <typename Scalar = double>
struct MmsDescriptor {
  enum class InterfaceMode { Prescribed, Free };

  struct Field {
    Scalar amplitude{1};
    Scalar wavenumber{0};
    Scalar frequency{0};
    Scalar phase{0};
    bool operator==(const Field&) const = default;
  };

  InterfaceMode interface_mode = InterfaceMode::Prescribed;
  Field vapor;
  Field liquid;
  Scalar x_mean{0.5};
  Scalar x_amplitude{0};
  Scalar x_frequency{0};

  Scalar interface_position(Scalar t) const { return x_mean + x_amplitude * std::sin(x_frequency * t); }
  Scalar interface_velocity(Scalar t) const {
    return x_amplitude * x_frequency * std::cos(x_frequency * t);
  }

  bool operator==(const MmsDescriptor&) const = default;
};

template <typename Scalar = double>
struct SolverConfig {
  Eigen::Index n_v = 65;
  Eigen::Index n_l = 65;
  int sbp_order = 4;
  Scalar dt{0};  // <= 0 selects the stability bound at the initial state
  Scalar t_end{0};
  Scalar outer_bc_v{};  // Dirichlet value at xi = 0
  Scalar outer_bc_l{};  // Dirichlet value at eta = 1
  Scalar u_v{0};        // uniform vapor velocity
  Scalar sigma_free{1};
  int audit_every = 10;
  Scalar cfl{0.25};
  Scalar c_stab{1};
  std::optional<MmsDescriptor<Scalar>> mms;

  bool operator==(const SolverConfig&) const = default;
};

enum class ProfileShape { Linear, Erf };

/// Initial temperature profile per phase, joining the outer boundary value to T_delta.
/// Erf profiles rise from T_delta at the interface over the given physical width.
template <typename Scalar = double>
struct InitialProfile {
  ProfileShape vapor = ProfileShape::Linear;
  ProfileShape liquid = ProfileShape::Linear;
  Scalar vapor_width{0};
  Scalar liquid_width{0};

  bool operator==(const InitialProfile&) const = default;
};

/// Complete physical and numerical description of one run.
template <typename Scalar = double>
struct Problem {
  std::string name;
  MaterialProps<Scalar> vapor;
  MaterialProps<Scalar> liquid;
  Scalar t_delta{};
  Scalar h_lv{};
  Scalar x0{0};
  Scalar xn{1};
  Scalar x_delta{0.5};
  InitialProfile<Scalar> initial;
  SolverConfig<Scalar> solver;

  bool operator==(const Problem&) const = default;
};

/// Throws ConfigError naming the offending field.
template <typename Scalar>
void validate_problem(const Problem<Scalar>& p) {
  validate(p.vapor, "materials.vapor");
  validate(p.liquid, "materials.liquid");
  derive_interface_constants(p.vapor, p.liquid, p.t_delta, p.h_lv);
  if (!(p.x0 < p.x_delta) || !(p.x_delta < p.xn)) {
    throw ConfigError("domain: need x0 < x_delta < xn");
  }
  const auto& s = p.solver;
  const Eigen::Index nmin = minimum_points(s.sbp_order);
  if (s.n_v < nmin) throw ConfigError("solver.n_v below the minimum for the SBP order");
  if (s.n_l < nmin) throw ConfigError("solver.n_l below the minimum for the SBP order");
  if (!(s.t_end >= Scalar(0))) throw ConfigError("solver.t_end must be non-negative");
  if (s.dt < Scalar(0)) throw ConfigError("solver.dt must be positive (or 0 for automatic)");
  if (!(s.sigma_free >= Scalar(0))) throw ConfigError("solver.sigma_free must be non-negative");
  if (s.audit_every < 1) throw ConfigError("solver.audit_every must be at least 1");
  if (!(s.cfl > Scalar(0))) throw ConfigError("solver.cfl must be positive");
  if (!(s.c_stab > Scalar(0))) throw ConfigError("solver.c_stab must be positive");
  if (p.initial.vapor == ProfileShape::Erf && !(p.initial.vapor_width > Scalar(0))) {
    throw ConfigError("initial.vapor_width must be positive for an erf profile");
  }
  if (p.initial.liquid == ProfileShape::Erf && !(p.initial.liquid_width > Scalar(0))) {
    throw ConfigError("initial.liquid_width must be positive for an erf profile");
  }
  if (s.mms) {
    const auto& m = *s.mms;
    const Scalar lo = m.x_mean - std::abs(m.x_amplitude);
    const Scalar hi = m.x_mean + std::abs(m.x_amplitude);
    if (!(p.x0 < lo) || !(hi < p.xn)) {
      throw ConfigError("mms: interface trajectory leaves the domain");
    }
  }
}

/// Immutable runtime context shared by the right-hand side, the integrator and the auditor.
template <typename Scalar = double>
struct Model {
  MaterialProps<Scalar> vapor;
  MaterialProps<Scalar> liquid;
  InterfacePhysics<Scalar> iphys;
  SolverConfig<Scalar> cfg;
  Scalar x0{};
  Scalar xn{};
  SbpOperator<Scalar> op_v;
  SbpOperator<Scalar> op_l;

  /// Validated model. Rejects non-physical data such as T_delta <= 0.
  static Model build(const Problem<Scalar>& p) {
    validate_problem(p);
    return build_unchecked(p, derive_interface_constants(p.vapor, p.liquid, p.t_delta, p.h_lv));
  }

  /// Skips the physical sign checks; used for homogeneous-data analysis variants.
  static Model build_unchecked(const Problem<Scalar>& p, InterfacePhysics<Scalar> iphys) {
    return Model{p.vapor,
                 p.liquid,
                 std::move(iphys),
                 p.solver,
                 p.x0,
                 p.xn,
                 build_unit_sbp<Scalar>(p.solver.sbp_order, p.solver.n_v),
                 build_unit_sbp<Scalar>(p.solver.sbp_order, p.solver.n_l)};
  }

  static Model build_unchecked(const Problem<Scalar>& p) {
    return build_unchecked(
        p, interface_constants_unchecked(p.vapor, p.liquid, p.t_delta, p.h_lv));
  }
};

}  // namespace evap
