#include "evap/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include "evap/config.hpp"

namespace evap {

std::string snapshot_header(Eigen::Index n_v, Eigen::Index n_l) {
  std::string h = "time,x_delta,u_tilde,a_v_delta";
  for (Eigen::Index i = 0; i < n_v; ++i) h += ",T_v" + std::to_string(i);
  for (Eigen::Index i = 0; i < n_l; ++i) h += ",T_l" + std::to_string(i);
  return h;
}

void write_snapshot_row(std::ostream& os, const SimState<double>& s,
                        const InterfaceState<double>& itf) {
  os << format_double(s.time) << ',' << format_double(s.x_delta) << ','
     << format_double(itf.u_tilde) << ',' << format_double(itf.a_v_delta);
  for (Eigen::Index i = 0; i < s.T_v.size(); ++i) os << ',' << format_double(s.T_v(i));
  for (Eigen::Index i = 0; i < s.T_l.size(); ++i) os << ',' << format_double(s.T_l(i));
  os << '\n';
}

std::string ledger_header() {
  return "time,energy,dissipation,it_direct,sat_direct,itsat_closed,bt_outer,rate_measured,"
         "identity_residual,gcl_residual";
}

void write_ledger_row(std::ostream& os, const EnergyLedger<double>& l) {
  for (double v : {l.time, l.energy, l.dissipation, l.it_direct, l.sat_direct, l.itsat_closed,
                   l.bt_outer, l.rate_measured, l.identity_residual}) {
    os << format_double(v) << ',';
  }
  os << format_double(l.gcl_residual) << '\n';
}

std::vector<SimState<double>> read_snapshots(const std::string& path, Eigen::Index n_v,
                                             Eigen::Index n_l) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  if (line != snapshot_header(n_v, n_l)) {
    throw ConfigError(path + ": header does not match the configured node counts");
  }
  std::vector<SimState<double>> out;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> values;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0;
      auto res = std::from_chars(p, comma, v);
      if (res.ec != std::errc() || res.ptr != comma) {
        throw ConfigError(path + ": malformed number on row " + std::to_string(row));
      }
      values.push_back(v);
      p = comma + 1;
    }
    if (static_cast<Eigen::Index>(values.size()) != 4 + n_v + n_l) {
      throw ConfigError(path + ": wrong column count on row " + std::to_string(row));
    }
    SimState<double> s;
    s.time = values[0];
    s.x_delta = values[1];
    s.T_v = Eigen::Map<const Vector<double>>(values.data() + 4, n_v);
    s.T_l = Eigen::Map<const Vector<double>>(values.data() + 4 + n_v, n_l);
    out.push_back(std::move(s));
  }
  return out;
}

void write_snapshots_csv(const std::string& path, const RunReport<double>& rep) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  const auto& first = rep.snapshots.empty() ? rep.final_state : rep.snapshots.front();
  os << snapshot_header(first.T_v.size(), first.T_l.size()) << '\n';
  for (size_t i = 0; i < rep.snapshots.size(); ++i) {
    write_snapshot_row(os, rep.snapshots[i], rep.snapshot_interfaces[i]);
  }
}

void write_ledger_csv(const std::string& path, const std::vector<EnergyLedger<double>>& ledger) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os << ledger_header() << '\n';
  for (const auto& l : ledger) write_ledger_row(os, l);
}

}  // namespace evap
