#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evap {

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  long samples = 10000;
  // Mutation hooks: each must make exactly its own property fail.
  bool inject_penalty_sign_flip = false;
  bool inject_q_perturbation = false;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  double max_residual = 0;
  double tolerance = 0;
  std::string detail;
};

/// Executable form of the stability and consistency properties:
/// SBP identity and accuracy, penalty invariants, IT+SAT closed form, PVAL
/// split, GCL, steady-state preservation and the strong-regime classifier.
std::vector<PropertyResult> run_verification(const VerifyOptions& opts);

}  // namespace evap
