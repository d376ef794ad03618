#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "evap/errors.hpp"
#include "evap/problem.hpp"

namespace evap {

/// Malformed configuration text; carries the 1-based position of the problem.
class ParseError : public ConfigError {
public:
  ParseError(const std::string& msg, int line, int column)
      : ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                    msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

struct OutputOptions {
  std::string dir = "out";
  long snapshot_every = 1;
  bool snapshots = true;
  bool ledger = true;
  bool summary = true;

  bool operator==(const OutputOptions&) const = default;
};

struct RunManifest {
  std::string config_path;
  Problem<double> problem;
  OutputOptions output;
  std::uint64_t seed = 20240917;
  std::vector<long> levels;  // grid levels for `converge`
  std::vector<std::string> warnings;

  bool operator==(const RunManifest& o) const {
    return problem == o.problem && output == o.output && seed == o.seed && levels == o.levels;
  }
};

/// One value of the configuration language: a TOML subset with [a.b] tables,
/// `key = value` pairs, numbers, booleans, double-quoted strings, flat arrays
/// and `#` comments.
struct ConfigValue {
  enum class Kind { Integer, Float, Bool, String, Array };
  Kind kind = Kind::Integer;
  long long integer = 0;
  double number = 0;
  bool boolean = false;
  std::string text;
  std::vector<ConfigValue> items;
  int line = 0;
  int column = 0;
};

/// Flat table keyed by dotted path ("solver.n_v").
using ConfigTable = std::map<std::string, ConfigValue>;

ConfigTable parse_config_text(std::string_view text);

/// Parses and validates. Unknown keys are errors unless `lenient`, in which
/// case they are collected in RunManifest::warnings.
RunManifest parse_config(std::string_view text, bool lenient = false);

RunManifest load_config(const std::string& path, bool lenient = false);

/// Writes every field explicitly; parse_config(serialize_config(m)) == m.
std::string serialize_config(const RunManifest& m);

/// Shortest decimal string that reads back to the same binary64 value.
std::string format_double(double v);

}  // namespace evap
