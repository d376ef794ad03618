#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evap/config.hpp"
#include "evap/simulation.hpp"
#include "evap/verify.hpp"

namespace evap {

/// P-weighted physical L2 error against the manufactured solution:
/// sqrt(sum over phases of J * e^T P e).
double mms_error(const Model<double>& model, const SimState<double>& state);

struct ConvergenceRow {
  long n = 0;
  double h = 0;
  double error = 0;
  double order = 0;  // observed order against the previous level; NaN for the first
  RunStatus status = RunStatus::Completed;
};

/// Runs `base` once per level with n_v = n_l = level. Levels may run concurrently.
std::vector<ConvergenceRow> convergence_study(const Problem<double>& base,
                                              const std::vector<long>& levels,
                                              bool parallel = true);

int cmd_run(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& opts, std::ostream& out);
int cmd_converge(const RunManifest& m, std::ostream& out, std::ostream& err,
                 bool parallel = true);
/// Recomputes the energy ledger for every row of an existing snapshots.csv.
int cmd_audit(const RunManifest& m, const std::string& snapshots_path, std::ostream& out,
              std::ostream& err);

}  // namespace evap
