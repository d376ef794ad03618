#include "evap/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "evap/presets.hpp"

namespace evap {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  ConfigTable parse() {
    ConfigTable table;
    std::string section;
    while (!at_end()) {
      skip_blank();
      if (at_end()) break;
      const char c = peek();
      if (c == '\n') {
        advance();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        advance();
        skip_spaces();
        section = read_key_path();
        skip_spaces();
        expect(']');
        finish_line();
        continue;
      }
      const int key_line = line_, key_col = col_;
      std::string key = read_key_path();
      skip_spaces();
      expect('=');
      skip_spaces();
      ConfigValue value = read_value();
      finish_line();
      const std::string full = section.empty() ? key : section + "." + key;
      if (table.count(full)) throw ParseError("duplicate key '" + full + "'", key_line, key_col);
      table.emplace(full, std::move(value));
    }
    return table;
  }

private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }
  void skip_blank() { skip_spaces(); }
  void skip_comment() {
    while (!at_end() && peek() != '\n') advance();
  }

  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  void finish_line() {
    skip_spaces();
    if (!at_end() && peek() == '#') skip_comment();
    if (!at_end()) {
      if (peek() != '\n') fail("unexpected trailing characters");
      advance();
    }
  }

  static bool key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string read_key_path() {
    std::string out;
    for (;;) {
      const size_t start = pos_;
      while (!at_end() && key_char(peek())) advance();
      if (pos_ == start) fail("expected a key");
      out.append(text_.substr(start, pos_ - start));
      skip_spaces();
      if (!at_end() && peek() == '.') {
        advance();
        skip_spaces();
        out.push_back('.');
        continue;
      }
      return out;
    }
  }

  ConfigValue read_value() {
    ConfigValue v;
    v.line = line_;
    v.column = col_;
    if (at_end()) fail("expected a value");
    const char c = peek();
    if (c == '"') {
      advance();
      v.kind = ConfigValue::Kind::String;
      while (!at_end() && peek() != '"') {
        if (peek() == '\n') fail("unterminated string");
        if (peek() == '\\') {
          advance();
          if (at_end()) fail("unterminated escape");
          const char e = peek();
          if (e == 'n') v.text.push_back('\n');
          else if (e == 't') v.text.push_back('\t');
          else if (e == '"' || e == '\\') v.text.push_back(e);
          else fail("unsupported escape sequence");
          advance();
          continue;
        }
        v.text.push_back(peek());
        advance();
      }
      expect('"');
      return v;
    }
    if (c == '[') {
      advance();
      v.kind = ConfigValue::Kind::Array;
      for (;;) {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n'))
          advance();
        if (at_end()) fail("unterminated array");
        if (peek() == ']') {
          advance();
          return v;
        }
        ConfigValue item = read_value();
        if (item.kind == ConfigValue::Kind::Array) fail("nested arrays are not supported");
        v.items.push_back(std::move(item));
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n'))
          advance();
        if (at_end()) fail("unterminated array");
        if (peek() == ',') {
          advance();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
    }
    // bare token: boolean or number
    const size_t start = pos_;
    while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' &&
           peek() != ']' && peek() != '#')
      advance();
    const std::string token(text_.substr(start, pos_ - start));
    if (token == "true" || token == "false") {
      v.kind = ConfigValue::Kind::Bool;
      v.boolean = token == "true";
      return v;
    }
    std::string digits;
    for (char ch : token)
      if (ch != '_') digits.push_back(ch);
    const char* b = digits.data();
    const char* e = digits.data() + digits.size();
    if (!digits.empty() && digits.find_first_of(".eE") == std::string::npos &&
        digits != "inf" && digits != "nan") {
      const char* bb = (*b == '+') ? b + 1 : b;
      auto res = std::from_chars(bb, e, v.integer);
      if (res.ec == std::errc() && res.ptr == e) {
        v.kind = ConfigValue::Kind::Integer;
        v.number = static_cast<double>(v.integer);
        return v;
      }
    }
    const char* fb = (!digits.empty() && *b == '+') ? b + 1 : b;
    auto res = std::from_chars(fb, e, v.number);
    if (digits.empty() || res.ec != std::errc() || res.ptr != e) {
      throw ParseError("invalid value '" + token + "'", v.line, v.column);
    }
    v.kind = ConfigValue::Kind::Float;
    return v;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Reader {
public:
  Reader(const ConfigTable& t) : table_(t) {}

  const ConfigValue* find(const std::string& key) {
    used_.insert(key);
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  void real(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (v->kind != ConfigValue::Kind::Float && v->kind != ConfigValue::Kind::Integer)
        type_error(key, *v, "a number");
      out = v->number;
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const auto* v = find(key)) {
      if (v->kind != ConfigValue::Kind::Integer) type_error(key, *v, "an integer");
      out = static_cast<Int>(v->integer);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (v->kind != ConfigValue::Kind::Bool) type_error(key, *v, "a boolean");
      out = v->boolean;
    }
  }

  bool string(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (v->kind != ConfigValue::Kind::String) type_error(key, *v, "a string");
      out = v->text;
      return true;
    }
    return false;
  }

  std::vector<std::string> unknown_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : table_)
      if (!used_.count(k)) out.push_back(k + " (line " + std::to_string(v.line) + ")");
    return out;
  }

  [[noreturn]] static void type_error(const std::string& key, const ConfigValue& v,
                                      const char* expected) {
    throw ParseError(key + " must be " + expected, v.line, v.column);
  }

private:
  const ConfigTable& table_;
  std::set<std::string> used_;
};

ProfileShape parse_shape(const std::string& key, const std::string& s) {
  if (s == "linear") return ProfileShape::Linear;
  if (s == "erf") return ProfileShape::Erf;
  throw ConfigError(key + " must be \"linear\" or \"erf\"");
}

const char* shape_name(ProfileShape s) { return s == ProfileShape::Linear ? "linear" : "erf"; }

}  // namespace

ConfigTable parse_config_text(std::string_view text) { return Lexer(text).parse(); }

RunManifest parse_config(std::string_view text, bool lenient) {
  const ConfigTable table = parse_config_text(text);
  Reader r(table);
  RunManifest m;

  std::string preset_name;
  if (r.string("preset", preset_name)) {
    m.problem = preset(preset_name);
  } else {
    m.problem = Problem<double>{};
    m.problem.name = "custom";
  }
  auto& p = m.problem;
  auto& s = p.solver;
  r.string("name", p.name);
  r.integer("seed", m.seed);

  for (auto [section, mat] : {std::pair{"materials.vapor", &p.vapor},
                              std::pair{"materials.liquid", &p.liquid}}) {
    const std::string sec = section;
    r.real(sec + ".rho", mat->rho);
    r.real(sec + ".cp", mat->cp);
    r.real(sec + ".k", mat->k);
  }
  r.real("interface.t_delta", p.t_delta);
  r.real("interface.h_lv", p.h_lv);
  r.real("domain.x0", p.x0);
  r.real("domain.xn", p.xn);
  r.real("domain.x_delta", p.x_delta);

  std::string shape;
  if (r.string("initial.vapor_profile", shape))
    p.initial.vapor = parse_shape("initial.vapor_profile", shape);
  if (r.string("initial.liquid_profile", shape))
    p.initial.liquid = parse_shape("initial.liquid_profile", shape);
  r.real("initial.vapor_width", p.initial.vapor_width);
  r.real("initial.liquid_width", p.initial.liquid_width);

  r.integer("solver.n_v", s.n_v);
  r.integer("solver.n_l", s.n_l);
  r.integer("solver.order", s.sbp_order);
  r.real("solver.dt", s.dt);
  r.real("solver.t_end", s.t_end);
  r.real("solver.u_v", s.u_v);
  r.real("solver.outer_bc_v", s.outer_bc_v);
  r.real("solver.outer_bc_l", s.outer_bc_l);
  r.real("solver.sigma_free", s.sigma_free);
  r.integer("solver.audit_every", s.audit_every);
  r.real("solver.cfl", s.cfl);
  r.real("solver.c_stab", s.c_stab);

  bool has_mms = false;
  r.boolean("mms.enabled", has_mms);
  {
    MmsDescriptor<double> d;
    std::string mode;
    if (r.string("mms.interface", mode)) {
      if (mode == "prescribed") d.interface_mode = MmsDescriptor<double>::InterfaceMode::Prescribed;
      else if (mode == "free") d.interface_mode = MmsDescriptor<double>::InterfaceMode::Free;
      else throw ConfigError("mms.interface must be \"prescribed\" or \"free\"");
    }
    r.real("mms.x_mean", d.x_mean);
    r.real("mms.x_amplitude", d.x_amplitude);
    r.real("mms.x_frequency", d.x_frequency);
    for (auto [phase, field] : {std::pair{"vapor", &d.vapor}, std::pair{"liquid", &d.liquid}}) {
      const std::string pre = std::string("mms.") + phase;
      r.real(pre + "_amplitude", field->amplitude);
      r.real(pre + "_wavenumber", field->wavenumber);
      r.real(pre + "_frequency", field->frequency);
      r.real(pre + "_phase", field->phase);
    }
    if (has_mms) s.mms = d;
  }

  r.string("output.dir", m.output.dir);
  r.integer("output.snapshot_every", m.output.snapshot_every);
  if (const auto* emit = r.find("output.emit")) {
    if (emit->kind != ConfigValue::Kind::Array) Reader::type_error("output.emit", *emit, "an array");
    m.output.snapshots = m.output.ledger = m.output.summary = false;
    for (const auto& item : emit->items) {
      if (item.kind != ConfigValue::Kind::String)
        Reader::type_error("output.emit", item, "an array of strings");
      if (item.text == "snapshots") m.output.snapshots = true;
      else if (item.text == "ledger") m.output.ledger = true;
      else if (item.text == "summary") m.output.summary = true;
      else throw ParseError("unknown output.emit entry '" + item.text + "'", item.line, item.column);
    }
  }
  if (const auto* levels = r.find("converge.levels")) {
    if (levels->kind != ConfigValue::Kind::Array)
      Reader::type_error("converge.levels", *levels, "an array");
    for (const auto& item : levels->items) {
      if (item.kind != ConfigValue::Kind::Integer)
        Reader::type_error("converge.levels", item, "an array of integers");
      m.levels.push_back(static_cast<long>(item.integer));
    }
  }

  const auto unknown = r.unknown_keys();
  if (!unknown.empty()) {
    if (!lenient) throw ConfigError("unknown configuration key: " + unknown.front());
    for (const auto& k : unknown) m.warnings.push_back("ignoring unknown key " + k);
  }

  if (m.output.snapshot_every < 1) throw ConfigError("output.snapshot_every must be at least 1");
  validate_problem(p);
  const auto iphys = derive_interface_constants(p.vapor, p.liquid, p.t_delta, p.h_lv);
  m.warnings.insert(m.warnings.end(), iphys.warnings.begin(), iphys.warnings.end());
  return m;
}

RunManifest load_config(const std::string& path, bool lenient) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto m = parse_config(ss.str(), lenient);
  m.config_path = path;
  return m;
}

std::string serialize_config(const RunManifest& m) {
  const auto& p = m.problem;
  const auto& s = p.solver;
  std::ostringstream o;
  auto q = [](const std::string& v) {
    std::string out = "\"";
    for (char c : v) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out + "\"";
  };
  auto d = [](double v) { return format_double(v); };

  o << "name = " << q(p.name) << "\n";
  o << "seed = " << m.seed << "\n\n";
  for (auto [section, mat] : {std::pair{"materials.vapor", &p.vapor},
                              std::pair{"materials.liquid", &p.liquid}}) {
    o << "[" << section << "]\n";
    o << "rho = " << d(mat->rho) << "\ncp = " << d(mat->cp) << "\nk = " << d(mat->k) << "\n\n";
  }
  o << "[interface]\nt_delta = " << d(p.t_delta) << "\nh_lv = " << d(p.h_lv) << "\n\n";
  o << "[domain]\nx0 = " << d(p.x0) << "\nxn = " << d(p.xn) << "\nx_delta = " << d(p.x_delta)
    << "\n\n";
  o << "[initial]\nvapor_profile = " << q(shape_name(p.initial.vapor))
    << "\nliquid_profile = " << q(shape_name(p.initial.liquid))
    << "\nvapor_width = " << d(p.initial.vapor_width)
    << "\nliquid_width = " << d(p.initial.liquid_width) << "\n\n";
  o << "[solver]\nn_v = " << s.n_v << "\nn_l = " << s.n_l << "\norder = " << s.sbp_order
    << "\ndt = " << d(s.dt) << "\nt_end = " << d(s.t_end) << "\nu_v = " << d(s.u_v)
    << "\nouter_bc_v = " << d(s.outer_bc_v) << "\nouter_bc_l = " << d(s.outer_bc_l)
    << "\nsigma_free = " << d(s.sigma_free) << "\naudit_every = " << s.audit_every
    << "\ncfl = " << d(s.cfl) << "\nc_stab = " << d(s.c_stab) << "\n\n";
  if (s.mms) {
    const auto& mm = *s.mms;
    o << "[mms]\nenabled = true\ninterface = "
      << q(mm.interface_mode == MmsDescriptor<double>::InterfaceMode::Prescribed ? "prescribed"
                                                                                 : "free")
      << "\nx_mean = " << d(mm.x_mean) << "\nx_amplitude = " << d(mm.x_amplitude)
      << "\nx_frequency = " << d(mm.x_frequency) << "\n";
    for (auto [phase, f] : {std::pair{"vapor", &mm.vapor}, std::pair{"liquid", &mm.liquid}}) {
      o << phase << "_amplitude = " << d(f->amplitude) << "\n"
        << phase << "_wavenumber = " << d(f->wavenumber) << "\n"
        << phase << "_frequency = " << d(f->frequency) << "\n"
        << phase << "_phase = " << d(f->phase) << "\n";
    }
    o << "\n";
  }
  o << "[output]\ndir = " << q(m.output.dir) << "\nsnapshot_every = " << m.output.snapshot_every
    << "\nemit = [";
  std::vector<std::string> emit;
  if (m.output.snapshots) emit.push_back("snapshots");
  if (m.output.ledger) emit.push_back("ledger");
  if (m.output.summary) emit.push_back("summary");
  for (size_t i = 0; i < emit.size(); ++i) o << (i ? ", " : "") << q(emit[i]);
  o << "]\n";
  if (!m.levels.empty()) {
    o << "\n[converge]\nlevels = [";
    for (size_t i = 0; i < m.levels.size(); ++i) o << (i ? ", " : "") << m.levels[i];
    o << "]\n";
  }
  return o.str();
}

}  // namespace evap
