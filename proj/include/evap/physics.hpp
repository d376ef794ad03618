#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "evap/errors.hpp"

namespace evap {

/// Constant material properties of one phase.
template <typename Scalar = double>
struct MaterialProps {
  Scalar rho{};  // density [kg/m^3]
  Scalar cp{};   // specific heat at constant pressure [J/(kg K)]
  Scalar k{};    // heat conduction coefficient [W/(m K)]

  Scalar beta() const { return rho * cp; }
  Scalar diffusivity() const { return k / beta(); }

  bool operator==(const MaterialProps&) const = default;
};

/// Throws ConfigError naming `prefix.field` for the first violated positivity constraint.
template <typename Scalar>
void validate(const MaterialProps<Scalar>& m, const std::string& prefix) {
  auto check = [&](Scalar value, const char* field) {
    if (!(value > Scalar(0)) || !std::isfinite(static_cast<double>(value))) {
      throw ConfigError(prefix + "." + field + " must be positive and finite");
    }
  };
  check(m.rho, "rho");
  check(m.cp, "cp");
  check(m.k, "k");
}

/// Interface data and the composite constants of the interface energy balance.
template <typename Scalar = double>
struct InterfacePhysics {
  Scalar t_delta{};  // evaporation temperature [K]
  Scalar h_lv{};     // latent heat [J/kg]
  Scalar rho_v{};
  Scalar gamma{};  // rho_v / rho_l
  Scalar c0{};     // (beta_l gamma - beta_v) t_delta^2
  Scalar c1{};     // 2 t_delta rho_v h_lv
  std::vector<std::string> warnings;
};

/// Builds the constants without the sign checks. Used for the homogeneous-data
/// variants of the energy analysis, where t_delta = 0 on purpose.
template <typename Scalar>
InterfacePhysics<Scalar> interface_constants_unchecked(const MaterialProps<Scalar>& vapor,
                                                       const MaterialProps<Scalar>& liquid,
                                                       Scalar t_delta, Scalar h_lv) {
  InterfacePhysics<Scalar> out;
  out.t_delta = t_delta;
  out.h_lv = h_lv;
  out.rho_v = vapor.rho;
  out.gamma = vapor.rho / liquid.rho;
  out.c0 = (liquid.beta() * out.gamma - vapor.beta()) * t_delta * t_delta;
  out.c1 = Scalar(2) * t_delta * vapor.rho * h_lv;
  return out;
}

template <typename Scalar>
InterfacePhysics<Scalar> derive_interface_constants(const MaterialProps<Scalar>& vapor,
                                                    const MaterialProps<Scalar>& liquid,
                                                    Scalar t_delta, Scalar h_lv) {
  validate(vapor, "materials.vapor");
  validate(liquid, "materials.liquid");
  if (!(h_lv > Scalar(0))) throw ConfigError("interface.h_lv must be positive");
  if (!(t_delta > Scalar(0))) {
    throw ConfigError("interface.t_delta must be positive (C1 = 2 T_delta rho_v h_lv > 0)");
  }
  auto out = interface_constants_unchecked(vapor, liquid, t_delta, h_lv);
  if (!(out.gamma < Scalar(1))) {
    out.warnings.push_back("gamma = rho_v/rho_l >= 1: vapor is not lighter than the liquid");
  }
  if (!(liquid.cp > vapor.cp)) {
    out.warnings.push_back(
        "cp_l <= cp_v gives C0 <= 0: the strong interface treatment is only energy bounded, "
        "not dissipative");
  }
  return out;
}

}  // namespace evap
