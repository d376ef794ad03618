#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evap/simulation.hpp"

namespace evap {

/// Header of snapshots.csv: time, x_delta, u_tilde, a_v_delta, T_v0.., T_l0..
std::string snapshot_header(Eigen::Index n_v, Eigen::Index n_l);

void write_snapshot_row(std::ostream& os, const SimState<double>& s,
                        const InterfaceState<double>& itf);

std::string ledger_header();

void write_ledger_row(std::ostream& os, const EnergyLedger<double>& led);

/// Reads a snapshots.csv back into states. Throws ConfigError on a malformed file
/// or a node count different from (n_v, n_l).
std::vector<SimState<double>> read_snapshots(const std::string& path, Eigen::Index n_v,
                                             Eigen::Index n_l);

void write_snapshots_csv(const std::string& path, const RunReport<double>& rep);
void write_ledger_csv(const std::string& path, const std::vector<EnergyLedger<double>>& ledger);

}  // namespace evap
