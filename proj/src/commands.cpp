#include "evap/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <ostream>

#include "json.hpp"

#include "evap/io.hpp"
#include "evap/mms.hpp"

namespace evap {

namespace fs = std::filesystem;
using json = nlohmann::json;

double mms_error(const Model<double>& model, const SimState<double>& state) {
  const auto& d = *model.cfg.mms;
  const auto mesh = build_mesh(model.x0, model.xn, state.x_delta, state.T_v.size(),
                               state.T_l.size());
  const auto t_delta = model.iphys.t_delta;
  const Vector<double> ev =
      state.T_v - mms_nodal(d, Phase::Vapor, t_delta, mesh.physical_v(), state.time);
  const Vector<double> el =
      state.T_l - mms_nodal(d, Phase::Liquid, t_delta, mesh.physical_l(), state.time);
  return std::sqrt(mesh.j_v * quadrature(model.op_v, ev, ev) +
                   mesh.j_l * quadrature(model.op_l, el, el));
}

std::vector<ConvergenceRow> convergence_study(const Problem<double>& base,
                                              const std::vector<long>& levels, bool parallel) {
  if (levels.size() < 2) throw ConfigError("converge needs at least two grid levels");
  if (!base.solver.mms) throw ConfigError("converge needs an [mms] section with enabled = true");

  auto one = [&base](long n) {
    Problem<double> p = base;
    p.solver.n_v = p.solver.n_l = n;
    const auto model = Model<double>::build(p);
    RunOptions<double> opts;
    opts.audit = false;
    opts.snapshot_every = std::numeric_limits<long>::max();
    const auto rep = run_simulation(model, initial_state(p), opts);
    ConvergenceRow row;
    row.n = n;
    row.h = 1.0 / static_cast<double>(n - 1);
    row.status = rep.status;
    row.error = rep.ok() ? mms_error(model, rep.final_state)
                         : std::numeric_limits<double>::quiet_NaN();
    return row;
  };

  std::vector<ConvergenceRow> rows;
  if (parallel) {
    std::vector<std::future<ConvergenceRow>> jobs;
    for (long n : levels) jobs.push_back(std::async(std::launch::async, one, n));
    for (auto& j : jobs) rows.push_back(j.get());
  } else {
    for (long n : levels) rows.push_back(one(n));
  }
  rows.front().order = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 1; i < rows.size(); ++i) {
    rows[i].order = std::log(rows[i - 1].error / rows[i].error) / std::log(rows[i - 1].h / rows[i].h);
  }
  return rows;
}

namespace {

json state_json(const SimState<double>& s) {
  return {{"time", s.time},
          {"x_delta", s.x_delta},
          {"T_v", std::vector<double>(s.T_v.begin(), s.T_v.end())},
          {"T_l", std::vector<double>(s.T_l.begin(), s.T_l.end())}};
}

json summary_json(const RunManifest& m, const RunReport<double>& rep, double wall) {
  json regimes = json::array();
  if (rep.saw_dissipative) regimes.push_back("dissipative");
  if (rep.saw_bounded) regimes.push_back("bounded");
  json j = {{"name", m.problem.name},
            {"status", to_string(rep.status)},
            {"dt", rep.dt},
            {"n_steps", rep.n_steps},
            {"snapshot_rows", rep.snapshots.size()},
            {"ledger_rows", rep.ledger.size()},
            {"final_state", state_json(rep.final_state)},
            {"min_temperature", rep.min_temperature},
            {"max_temperature", rep.max_temperature},
            {"max_residuals",
             {{"identity", rep.max_identity_residual},
              {"closed_form", rep.max_closed_form_residual},
              {"gcl", rep.max_gcl_residual}}},
            {"audit_violations", rep.audit_violations},
            {"regimes", regimes},
            {"wall_time_s", wall}};
  if (!rep.ok()) {
    j["failure"] = {{"message", rep.message},
                    {"step", rep.failed_step},
                    {"term", rep.failed_term},
                    {"node", rep.failed_node}};
  }
  return j;
}

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("output.dir '" + dir + "' is not writable");
}

}  // namespace

int cmd_run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  for (const auto& w : m.warnings) err << "warning: " << w << '\n';
  const auto model = Model<double>::build(m.problem);
  for (const auto& w : model.iphys.warnings) err << "warning: " << w << '\n';
  prepare_dir(m.output.dir);

  RunOptions<double> opts;
  opts.snapshot_every = m.output.snapshot_every;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_simulation(model, initial_state(m.problem), opts);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir(m.output.dir);
  if (m.output.snapshots) write_snapshots_csv((dir / "snapshots.csv").string(), rep);
  if (m.output.ledger) write_ledger_csv((dir / "ledger.csv").string(), rep.ledger);
  if (m.output.summary) {
    std::ofstream js(dir / "summary.json");
    js << summary_json(m, rep, wall).dump(2) << '\n';
  }

  out << m.problem.name << ": " << to_string(rep.status) << " after " << rep.n_steps
      << " steps (dt " << format_double(rep.dt) << "), x_delta " << format_double(rep.final_state.x_delta)
      << "\n  max identity residual " << format_double(rep.max_identity_residual)
      << ", closed-form " << format_double(rep.max_closed_form_residual) << ", gcl "
      << format_double(rep.max_gcl_residual) << '\n';
  if (!rep.ok()) {
    err << "error: " << rep.message << '\n';
    return 1;
  }
  if (rep.audit_violations > 0) {
    err << "error: " << rep.audit_violations << " audited steps violated a tolerance\n";
    return 3;
  }
  return 0;
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out) {
  int failures = 0;
  for (const auto& r : run_verification(opts)) {
    out << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(26) << r.name
        << " max " << format_double(r.max_residual) << " (tol " << format_double(r.tolerance)
        << ")";
    if (!r.detail.empty()) out << "  " << r.detail;
    out << '\n';
    if (!r.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

int cmd_converge(const RunManifest& m, std::ostream& out, std::ostream& err, bool parallel) {
  for (const auto& w : m.warnings) err << "warning: " << w << '\n';
  const auto rows = convergence_study(m.problem, m.levels, parallel);
  out << std::left << std::setw(8) << "n" << std::setw(24) << "h" << std::setw(24) << "error"
      << "order\n";
  bool ok = true;
  for (const auto& r : rows) {
    out << std::setw(8) << r.n << std::setw(24) << format_double(r.h) << std::setw(24)
        << format_double(r.error) << (std::isnan(r.order) ? "-" : format_double(r.order))
        << '\n';
    if (r.status != RunStatus::Completed) {
      err << "error: level " << r.n << " ended with " << to_string(r.status) << '\n';
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

int cmd_audit(const RunManifest& m, const std::string& snapshots_path, std::ostream& out,
              std::ostream& err) {
  const auto model = Model<double>::build(m.problem);
  const auto states = read_snapshots(snapshots_path, m.problem.solver.n_v, m.problem.solver.n_l);
  std::vector<EnergyLedger<double>> ledger;
  long violations = 0;
  double worst_identity = 0, worst_closed = 0, worst_gcl = 0;
  for (const auto& s : states) {
    auto led = audit_step(s, assemble_rhs(s, model), model);
    worst_identity = std::max(worst_identity, led.identity_residual);
    worst_closed = std::max(worst_closed, led.closed_form_residual);
    worst_gcl = std::max(worst_gcl, led.gcl_residual);
    for (const auto& v : led.violations) err << "t = " << format_double(s.time) << ": " << v << '\n';
    if (!led.ok()) ++violations;
    ledger.push_back(std::move(led));
  }
  prepare_dir(m.output.dir);
  write_ledger_csv((fs::path(m.output.dir) / "ledger.csv").string(), ledger);
  out << "audited " << states.size() << " snapshots: max identity residual "
      << format_double(worst_identity) << ", closed-form " << format_double(worst_closed)
      << ", gcl " << format_double(worst_gcl) << ", " << violations << " violations\n";
  return violations == 0 ? 0 : 3;
}

}  // namespace evap
