#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "evap/commands.hpp"
#include "evap/io.hpp"
#include "evap/presets.hpp"
#include "support/problems.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "evap_tests" / name;
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<double>> read_csv(const fs::path& file) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  return {std::istreambuf_iterator<char>(in), {}};
}

evap::RunManifest manifest(const std::string& preset, const fs::path& dir) {
  evap::RunManifest m;
  m.problem = evap::preset(preset);
  m.output.dir = dir.string();
  return m;
}

evap::MmsDescriptor<double> linear_mms() {
  evap::MmsDescriptor<double> d;
  d.x_mean = 0.4;
  d.vapor = {1.5, 0, 0, 0};
  d.liquid = {-0.5, 0, 0, 0};
  return d;
}

}  // namespace

TEST(CmdRun, SteadyWritesAllOutputs) {
  const auto dir = scratch("steady");
  auto m = manifest("steady", dir);
  m.problem.solver.t_end = 200 * 1e-5;
  m.problem.solver.dt = 1e-5;
  m.output.snapshot_every = 7;
  std::ostringstream out, err;
  ASSERT_EQ(evap::cmd_run(m, out, err), 0) << err.str();
  ASSERT_TRUE(fs::exists(dir / "snapshots.csv"));
  ASSERT_TRUE(fs::exists(dir / "ledger.csv"));
  ASSERT_TRUE(fs::exists(dir / "summary.json"));

  const auto snaps = read_csv(dir / "snapshots.csv");
  EXPECT_EQ(static_cast<long>(snaps.size()), evap::cadence_count(200, 7));
  const auto ledger = read_csv(dir / "ledger.csv");
  EXPECT_EQ(static_cast<long>(ledger.size()),
            evap::cadence_count(200, m.problem.solver.audit_every));
  for (const auto& row : ledger) EXPECT_LE(row.at(8), 1e-9);

  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["status"], "completed");
  EXPECT_EQ(summary["n_steps"], 200);
  EXPECT_FALSE(summary.contains("failure"));
  EXPECT_EQ(summary["snapshot_rows"], snaps.size());
}

TEST(CmdRun, ZeroEndTimeWritesInitialRowOnly) {
  const auto dir = scratch("zero");
  auto m = manifest("stefan", dir);
  m.problem.solver.t_end = 0;
  std::ostringstream out, err;
  ASSERT_EQ(evap::cmd_run(m, out, err), 0);
  const auto snaps = read_csv(dir / "snapshots.csv");
  ASSERT_EQ(snaps.size(), 1u);
  EXPECT_EQ(snaps[0][0], 0.0);
  EXPECT_EQ(snaps[0][1], m.problem.x_delta);
}

TEST(CmdRun, StefanFrontAdvancesMonotonically) {
  const auto dir = scratch("stefan");
  auto m = manifest("stefan", dir);
  m.output.snapshot_every = 50;
  std::ostringstream out, err;
  ASSERT_EQ(evap::cmd_run(m, out, err), 0) << err.str();
  const auto snaps = read_csv(dir / "snapshots.csv");
  ASSERT_GT(snaps.size(), 10u);
  for (size_t i = 1; i < snaps.size(); ++i) EXPECT_GT(snaps[i][1], snaps[i - 1][1]) << i;
}

TEST(CmdRun, OutputIsDeterministic) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    auto m = manifest("sucking", dir);
    m.problem.solver.t_end = 5e-5;
    std::ostringstream out, err;
    ASSERT_EQ(evap::cmd_run(m, out, err), 0);
  }
  EXPECT_EQ(slurp(a / "snapshots.csv"), slurp(b / "snapshots.csv"));
  EXPECT_EQ(slurp(a / "ledger.csv"), slurp(b / "ledger.csv"));
}

TEST(CmdRun, EmitSubset) {
  const auto dir = scratch("emit");
  auto m = manifest("steady", dir);
  m.problem.solver.t_end = 1e-4;
  m.output.snapshots = false;
  m.output.ledger = false;
  std::ostringstream out, err;
  ASSERT_EQ(evap::cmd_run(m, out, err), 0);
  EXPECT_FALSE(fs::exists(dir / "snapshots.csv"));
  EXPECT_FALSE(fs::exists(dir / "ledger.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(CmdRun, UnwritableDirectory) {
  const auto dir = scratch("blocked");
  fs::create_directories(dir.parent_path());
  std::ofstream(dir) << "a file, not a directory";
  auto m = manifest("steady", dir);
  m.problem.solver.t_end = 1e-5;
  std::ostringstream out, err;
  EXPECT_THROW(evap::cmd_run(m, out, err), evap::ConfigError);
  fs::remove(dir);
}

TEST(CmdVerify, CleanBuildPassesAndInjectionsFail) {
  std::ostringstream out;
  evap::VerifyOptions opts;
  opts.samples = 50;
  EXPECT_EQ(evap::cmd_verify(opts, out), 0) << out.str();
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos);

  for (int inject = 0; inject < 2; ++inject) {
    auto broken = opts;
    broken.inject_penalty_sign_flip = inject == 0;
    broken.inject_q_perturbation = inject == 1;
    std::ostringstream bad;
    EXPECT_NE(evap::cmd_verify(broken, bad), 0);
    EXPECT_NE(bad.str().find("FAIL"), std::string::npos);
  }
}

TEST(Converge, RejectsBadInputs) {
  auto p = evap::testing::unit_problem();
  EXPECT_THROW(evap::convergence_study(p, {17, 33}), evap::ConfigError);
  p.solver.mms = linear_mms();
  EXPECT_THROW(evap::convergence_study(p, {17}), evap::ConfigError);
}

TEST(Converge, LinearManufacturedSolutionIsExact) {
  auto p = evap::testing::unit_problem(4);
  p.solver.mms = linear_mms();
  p.solver.t_end = 0.02;
  for (bool parallel : {true, false}) {
    const auto rows = evap::convergence_study(p, {17, 25, 33}, parallel);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(std::isnan(rows[0].order));
    for (const auto& r : rows) {
      EXPECT_EQ(r.status, evap::RunStatus::Completed);
      EXPECT_LT(r.error, 1e-12) << r.n;
      EXPECT_DOUBLE_EQ(r.h, 1.0 / static_cast<double>(r.n - 1));
    }
  }
}

TEST(Converge, PrintsTable) {
  evap::RunManifest m;
  m.problem = evap::testing::unit_problem(2);
  auto d = linear_mms();
  d.vapor.wavenumber = 3;
  d.liquid.wavenumber = 2;
  d.vapor.frequency = 1;
  m.problem.solver.mms = d;
  m.levels = {17, 33, 65};
  std::ostringstream out, err;
  ASSERT_EQ(evap::cmd_converge(m, out, err), 0) << err.str();
  std::istringstream lines(out.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 4);
}

TEST(CmdAudit, RecomputesLedgerFromSnapshots) {
  const auto dir = scratch("audit");
  auto m = manifest("stefan", dir);
  m.problem.solver.t_end = 3e-5;
  std::ostringstream out, err;
  ASSERT_EQ(evap::cmd_run(m, out, err), 0);
  const auto snaps = read_csv(dir / "snapshots.csv");

  const auto again = scratch("audit_out");
  auto m2 = m;
  m2.output.dir = again.string();
  ASSERT_EQ(evap::cmd_audit(m2, (dir / "snapshots.csv").string(), out, err), 0) << err.str();
  const auto ledger = read_csv(again / "ledger.csv");
  ASSERT_EQ(ledger.size(), snaps.size());
  for (const auto& row : ledger) EXPECT_LE(row.at(8), 1e-9);

  m2.problem.solver.n_v += 1;
  EXPECT_THROW(evap::cmd_audit(m2, (dir / "snapshots.csv").string(), out, err),
               evap::ConfigError);
}

TEST(Snapshots, ReadBackMatchesWrittenStates) {
  const auto dir = scratch("readback");
  auto m = manifest("sucking", dir);
  m.problem.solver.t_end = 2e-5;
  std::ostringstream out, err;
  ASSERT_EQ(evap::cmd_run(m, out, err), 0);
  const auto states = evap::read_snapshots((dir / "snapshots.csv").string(),
                                           m.problem.solver.n_v, m.problem.solver.n_l);
  const auto snaps = read_csv(dir / "snapshots.csv");
  ASSERT_EQ(states.size(), snaps.size());
  for (size_t i = 0; i < states.size(); ++i) {
    EXPECT_EQ(states[i].time, snaps[i][0]);
    EXPECT_EQ(states[i].x_delta, snaps[i][1]);
    EXPECT_EQ(states[i].T_v(0), snaps[i][4]);
    EXPECT_EQ(states[i].T_l(states[i].T_l.size() - 1), snaps[i].back());
  }
  EXPECT_THROW(evap::read_snapshots((dir / "missing.csv").string(), 3, 3), evap::ConfigError);
}
