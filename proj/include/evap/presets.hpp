#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "evap/problem.hpp"
#include "evap/solver.hpp"

namespace evap {

/// Names accepted by `preset`.
std::vector<std::string> preset_names();

/// Validated water/steam configurations at 1 atm.
///   stefan  - superheated vapor next to a wall at x0, liquid at T_delta
///   sucking - vapor at T_delta, superheated liquid
///   steady  - everything at T_delta with matching outer data (a fixed point)
Problem<double> preset(std::string_view name);

/// The same problem with all data set to zero (T_delta = 0, outer values 0)
/// and the initial temperatures shifted by -T_delta. Builds with
/// Model::build_unchecked because T_delta = 0 is not physical data.
struct HomogeneousVariant {
  Problem<double> problem;
  SimState<double> initial;
};

HomogeneousVariant homogeneous_variant(const Problem<double>& p);

}  // namespace evap
