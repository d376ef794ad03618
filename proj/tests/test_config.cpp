#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <random>

#include "evap/config.hpp"
#include "evap/presets.hpp"

using evap::parse_config;

namespace {

std::string message_of(const std::string& text, bool lenient = false) {
  try {
    parse_config(text, lenient);
  } catch (const evap::ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, MinimalPresetDocument) {
  const auto m = parse_config("preset = \"stefan\"\n");
  EXPECT_EQ(m.problem, evap::preset("stefan"));
  EXPECT_EQ(m.output, evap::OutputOptions{});
  EXPECT_EQ(m.seed, 20240917u);
  EXPECT_TRUE(m.levels.empty());
}

TEST(Config, OverridesOnTopOfPreset) {
  const auto m = parse_config(R"(
preset = "sucking"   # comment after a value
[solver]
n_v = 33
t_end = 2.5e-5
[output]
dir = "runs/a"
emit = ["ledger", "summary"]
[converge]
levels = [33, 65]
)");
  EXPECT_EQ(m.problem.solver.n_v, 33);
  EXPECT_EQ(m.problem.solver.n_l, 65);
  EXPECT_DOUBLE_EQ(m.problem.solver.t_end, 2.5e-5);
  EXPECT_EQ(m.output.dir, "runs/a");
  EXPECT_FALSE(m.output.snapshots);
  EXPECT_TRUE(m.output.ledger);
  EXPECT_EQ(m.levels, (std::vector<long>{33, 65}));
}

TEST(Config, ValidationNamesTheField) {
  const auto msg = message_of("preset = \"stefan\"\n[materials.vapor]\nrho = -1\n");
  EXPECT_NE(msg.find("materials.vapor.rho"), std::string::npos) << msg;
  EXPECT_NE(message_of("preset = \"stefan\"\n[solver]\nn_v = 5\n").find("solver.n_v"),
            std::string::npos);
  EXPECT_NE(message_of("[domain]\nx0 = 0\n").find("materials.vapor"), std::string::npos);
}

TEST(Config, ParseErrorsCarryPosition) {
  try {
    parse_config("preset = \"stefan\"\n[solver\nn_v = 3\n");
    FAIL();
  } catch (const evap::ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GE(e.column(), 1);
  }
  try {
    parse_config("preset = \"stefan\"\n[solver]\nn_v = 3x\n");
    FAIL();
  } catch (const evap::ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_config("preset = \"stefan\"\n[solver]\nn_v = \"many\"\n"), evap::ParseError);
  EXPECT_THROW(parse_config("preset = \"stefan\"\npreset = \"sucking\"\n"), evap::ParseError);
}

TEST(Config, UnknownKeysStrictAndLenient) {
  const std::string doc = "preset = \"stefan\"\n[solver]\nn_vv = 33\n";
  EXPECT_NE(message_of(doc).find("solver.n_vv"), std::string::npos);
  const auto m = parse_config(doc, true);
  ASSERT_FALSE(m.warnings.empty());
  EXPECT_NE(m.warnings.front().find("solver.n_vv"), std::string::npos);
}

TEST(Config, UnknownPreset) { EXPECT_NE(message_of("preset = \"boil\"\n").find("boil"), std::string::npos); }

TEST(Config, RoundTripPresets) {
  for (const auto& name : evap::preset_names()) {
    const auto m = parse_config("preset = \"" + name + "\"\n");
    const auto again = parse_config(evap::serialize_config(m));
    EXPECT_EQ(again, m) << name;
    EXPECT_EQ(evap::serialize_config(again), evap::serialize_config(m));
  }
}

TEST(Config, RoundTripRandomManifests) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 50; ++i) {
    evap::RunManifest m;
    m.problem = evap::preset("stefan");
    m.problem.name = "run \"" + std::to_string(i) + "\"";
    m.problem.vapor.k = u(rng) / 3;
    m.problem.liquid.cp = 1e3 * u(rng);
    m.problem.solver.u_v = u(rng) * 1e-3;
    m.problem.solver.outer_bc_v = 373.15 + u(rng);
    m.problem.solver.n_l = 40 + i;
    m.problem.initial.vapor = evap::ProfileShape::Erf;
    m.problem.initial.vapor_width = u(rng) * 1e-5;
    if (i % 2) {
      evap::MmsDescriptor<double> d;
      d.interface_mode = evap::MmsDescriptor<double>::InterfaceMode::Free;
      d.x_mean = 5e-4;
      d.x_amplitude = 1e-4 / u(rng);
      d.x_frequency = u(rng);
      d.vapor = {u(rng), u(rng), u(rng), u(rng)};
      d.liquid = {u(rng), u(rng), u(rng), u(rng)};
      m.problem.solver.mms = d;
    }
    m.output.dir = "out/" + std::to_string(i);
    m.output.snapshot_every = i + 1;
    m.output.summary = i % 3 != 0;
    m.seed = rng() >> 1;  // TOML integers are signed 64-bit
    m.levels = {17, 33};
    EXPECT_EQ(parse_config(evap::serialize_config(m)), m) << i;
  }
}

TEST(Config, ShortestRoundTripNumbers) {
  std::mt19937_64 rng(9);
  for (double v : {0.1, 373.15, 1e-300, -2.5e10, 5e-324, 0.0}) {
    const auto s = evap::format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
  EXPECT_EQ(evap::format_double(0.1), "0.1");
  EXPECT_EQ(evap::format_double(2.0), "2");
  for (int i = 0; i < 1000; ++i) {
    double v;
    const auto bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto s = evap::format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v);
  }
}
