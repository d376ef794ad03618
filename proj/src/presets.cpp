#include "evap/presets.hpp"

#include "evap/simulation.hpp"

namespace evap {

namespace {

// Saturated water and steam at 100 C (p = 101.42 kPa), IAPWS-IF97 tables.
constexpr double kTsat = 373.15;
constexpr double kHlv = 2.2564e6;
const MaterialProps<double> kSteam{0.59817, 2080.0, 0.02510};
const MaterialProps<double> kWater{958.35, 4216.1, 0.6791};

Problem<double> base(std::string name) {
  Problem<double> p;
  p.name = std::move(name);
  p.vapor = kSteam;
  p.liquid = kWater;
  p.t_delta = kTsat;
  p.h_lv = kHlv;
  p.x0 = 0.0;
  p.xn = 1.0e-3;
  p.x_delta = 1.0e-4;
  p.solver.n_v = 65;
  p.solver.n_l = 65;
  p.solver.sbp_order = 4;
  p.solver.t_end = 1.0e-4;
  p.solver.u_v = 0.0;  // vapor at rest against the wall at x0
  p.solver.outer_bc_v = kTsat;
  p.solver.outer_bc_l = kTsat;
  return p;
}

}  // namespace

std::vector<std::string> preset_names() { return {"stefan", "sucking", "steady"}; }

Problem<double> preset(std::string_view name) {
  Problem<double> p;
  if (name == "stefan") {
    p = base("stefan");
    p.solver.outer_bc_v = kTsat + 10.0;
  } else if (name == "sucking") {
    p = base("sucking");
    p.solver.outer_bc_l = kTsat + 5.0;
    p.initial.liquid = ProfileShape::Erf;
    p.initial.liquid_width = 1.0e-4;
  } else if (name == "steady") {
    p = base("steady");
    p.solver.t_end = 1.0e-5;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) +
                      "' (expected stefan, sucking or steady)");
  }
  validate_problem(p);
  return p;
}

HomogeneousVariant homogeneous_variant(const Problem<double>& p) {
  HomogeneousVariant out{p, initial_state(p)};
  out.initial.T_v.array() -= p.t_delta;
  out.initial.T_l.array() -= p.t_delta;
  out.problem.name = p.name + "-homogeneous";
  out.problem.t_delta = 0.0;
  out.problem.solver.outer_bc_v = 0.0;
  out.problem.solver.outer_bc_l = 0.0;
  return out;
}

}  // namespace evap
