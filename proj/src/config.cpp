#include "ionmux/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "ionmux/errors.hpp"

#ifndef IONMUX_PRESET_DIR
#define IONMUX_PRESET_DIR "presets"
#endif

namespace ionmux {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxPresetDepth = 4;

using VT = ValueType;

// clang-format off
const std::vector<KeySpec> kSchema = {
  {"scenario.preset",         VT::Text,        0, 0,    false, false, true,  "none", ""},
  {"atomic.p_br_d",           VT::Real,        0, 1,    false, false, false, "0.06", ""},
  {"atomic.w_up",             VT::Real,        0, 1,    false, false, false, "0.6666666666666666", ""},
  {"atomic.tau_p",            VT::Time,        0, kInf, true,  false, false, "7 ns", ""},
  {"strategy.name",           VT::Text,        0, 0,    false, false, false, "none",
   "none|every|block-4|block-3322|custom"},
  {"strategy.pulses",         VT::Integer,     1, 100000, false, false, false, "1", ""},
  {"strategy.pump_after",     VT::IntList,     1, 100000, false, false, false, "", ""},
  {"strategy.window",         VT::Time,        0, kInf, true,  true,  false, "inf", ""},
  {"timing.pulse_interval",   VT::Time,        0, kInf, false, false, false, "0 s", ""},
  {"timing.pump",             VT::Time,        0, kInf, false, false, false, "100 ns", ""},
  {"timing.initial_pump",     VT::Time,        0, kInf, false, false, false, "1 us", ""},
  {"timing.shelve",           VT::Time,        0, kInf, false, false, false, "0 s", ""},
  {"protocol.ions",           VT::Integer,     1, 1024, false, false, false, "1", ""},
  {"protocol.shuttle_time",   VT::Time,        0, kInf, false, false, false, "0 s", ""},
  {"protocol.shuttle_plan",   VT::IntList,     0, 1023, false, false, false, "", ""},
  {"protocol.return_shuttle", VT::Boolean,     0, 0,    false, false, false, "true", ""},
  {"cooling.duration",        VT::Time,        0, kInf, false, false, false, "0 s", ""},
  {"cooling.every",           VT::Integer,     1, 1e9,  false, false, false, "1", ""},
  {"link.length",             VT::Length,      0, kInf, false, false, false, "0 m", ""},
  {"link.c_fiber",            VT::Speed,       0, kInf, true,  false, false, "2e8 m/s", ""},
  {"link.comm_overhead",      VT::Time,        0, kInf, false, false, false, "0 s", ""},
  {"link.t_ovh",              VT::Time,        0, kInf, false, false, true,  "none", ""},
  {"link.dt",                 VT::Time,        0, kInf, false, false, false, "0 s", ""},
  {"link.n_max",              VT::Integer,     1, 1e6,  false, false, false, "40", ""},
  {"efficiency.collection",   VT::Real,        0, 1,    false, false, false, "1", ""},
  {"efficiency.conversion",   VT::Real,        0, 1,    false, false, false, "1", ""},
  {"efficiency.attenuation",  VT::Attenuation, 0, kInf, false, false, false, "3 dB/km", ""},
  {"efficiency.detector",     VT::Real,        0, 1,    false, false, false, "1", ""},
  {"efficiency.other",        VT::Real,        0, 1,    false, false, false, "1", ""},
  {"memory.a",                VT::Real,        0, 0.5,  true,  false, false, "0.5", ""},
  {"memory.tau_coh",          VT::Time,        0, kInf, true,  false, false, "366 ms", ""},
  {"memory.tau_life",         VT::Time,        0, kInf, true,  false, false, "958 ms", ""},
  {"memory.survival",         VT::Real,        0, 1,    false, false, true,  "none", ""},
  {"calibration.target_rate", VT::Rate,        0, kInf, true,  false, true,  "none", ""},
  {"bsm.efficiency",          VT::Real,        0, 1,    false, false, false, "0.5", ""},
  {"bsm.axis",                VT::Text,        0, 0,    false, false, false, "mode_count",
   "mode_count|ion_count"},
  {"bsm.grid",                VT::IntList,     1, 100000, false, false, false, "1", ""},
  {"optimize.pulses",         VT::Integer,     1, 100000, false, false, false, "12", ""},
  {"optimize.objective",      VT::Text,        0, 0,    false, false, false, "total_emission",
   "total_emission|emission_rate"},
  {"optimize.method",         VT::Text,        0, 0,    false, false, false, "dp", "dp|exhaustive"},
  {"sweep.key",               VT::Text,        0, 0,    false, false, true,  "none", ""},
  {"sweep.values",            VT::TextList,    0, 0,    false, false, false, "", ""},
  {"mc.samples",              VT::Integer,     0, 1e10, false, false, false, "0", ""},
  {"run.seed",                VT::Integer,     0, 9.2e18, false, false, false, "1", ""},
};
// clang-format on

struct Unit {
  std::string_view suffix;
  double scale;
};

std::vector<Unit> units_for(ValueType type) {
  switch (type) {
    case VT::Time: return {{"ns", 1e-9}, {"us", 1e-6}, {"µs", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
    case VT::Length: return {{"km", 1e3}, {"m", 1.0}};
    case VT::Speed: return {{"km/s", 1e3}, {"m/s", 1.0}};
    case VT::Attenuation: return {{"dB/km", 1.0}};
    case VT::Rate: return {{"/s", 1.0}, {"1/s", 1.0}, {"Hz", 1.0}};
    default: return {};
  }
}

std::string_view canonical_unit(ValueType type) {
  switch (type) {
    case VT::Time: return "s";
    case VT::Length: return "m";
    case VT::Speed: return "m/s";
    case VT::Attenuation: return "dB/km";
    case VT::Rate: return "/s";
    default: return "";
  }
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string shortest(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string accepted_range(const KeySpec& spec) {
  std::string unit(canonical_unit(spec.type));
  std::string out = spec.min_exclusive ? "(" : "[";
  out += shortest(spec.min) + ", " + shortest(spec.max);
  out += spec.max == kInf && !spec.allow_inf ? ")" : "]";
  if (!unit.empty()) out += " " + unit;
  if (spec.optional) out += " or none";
  return out;
}

[[noreturn]] void reject(const KeySpec& spec, std::string_view text, const std::string& why) {
  std::string msg = "key '" + std::string(spec.key) + "' = '" + std::string(text) + "': " + why;
  switch (spec.type) {
    case VT::Text:
      if (!spec.choices.empty()) msg += "; accepted values: " + std::string(spec.choices);
      break;
    case VT::Boolean: msg += "; accepted values: true|false"; break;
    case VT::IntList:
      msg += "; accepted: comma-separated integers in " + accepted_range(spec);
      break;
    case VT::TextList: msg += "; accepted: comma-separated values"; break;
    default: msg += "; accepted range " + accepted_range(spec); break;
  }
  throw ConfigError(std::string(spec.key), msg);
}

double parse_double(const KeySpec& spec, std::string_view text, std::string_view number) {
  if (number == "inf" || number == "+inf") return kInf;
  double v = 0.0;
  const auto* first = number.data();
  const auto* last = number.data() + number.size();
  if (!number.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) reject(spec, text, "not a number");
  return v;
}

void check_range(const KeySpec& spec, std::string_view text, double v) {
  if (std::isnan(v)) reject(spec, text, "not a number");
  if (std::isinf(v) && !spec.allow_inf) reject(spec, text, "infinite value not allowed");
  const bool low = spec.min_exclusive ? !(v > spec.min) : !(v >= spec.min);
  if (low || v > spec.max) reject(spec, text, "out of range");
}

}  // namespace

const std::vector<KeySpec>& config_schema() { return kSchema; }

const KeySpec* find_key(std::string_view key) {
  for (const auto& spec : kSchema) {
    if (spec.key == key) return &spec;
  }
  return nullptr;
}

Value parse_value(const KeySpec& spec, std::string_view raw) {
  const std::string_view text = trim(raw);
  if (spec.optional && text == "none") return std::monostate{};
  switch (spec.type) {
    case VT::Time:
    case VT::Length:
    case VT::Speed:
    case VT::Attenuation:
    case VT::Rate: {
      if (spec.allow_inf && (text == "inf" || text == "+inf")) return kInf;
      // Longest matching suffix wins ("ms" before "s", "km" before "m").
      std::string_view number;
      double scale = 0.0;
      std::size_t best = 0;
      for (const auto& u : units_for(spec.type)) {
        if (text.size() > u.suffix.size() && text.ends_with(u.suffix) && u.suffix.size() > best) {
          best = u.suffix.size();
          number = trim(text.substr(0, text.size() - u.suffix.size()));
          scale = u.scale;
        }
      }
      if (best == 0) {
        std::string accepted;
        for (const auto& u : units_for(spec.type)) {
          accepted += (accepted.empty() ? "" : ", ") + std::string(u.suffix);
        }
        reject(spec, text, "missing or unknown unit (expected one of " + accepted + ")");
      }
      // Divide for sub-unit prefixes so "7 ns" is the double nearest 7e-9.
      const double x = parse_double(spec, text, number);
      const double v = scale < 1.0 ? x / std::round(1.0 / scale) : x * scale;
      check_range(spec, text, v);
      return v;
    }
    case VT::Real: {
      const double v = parse_double(spec, text, text);
      check_range(spec, text, v);
      return v;
    }
    case VT::Integer: {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        reject(spec, text, "not an integer");
      }
      check_range(spec, text, static_cast<double>(v));
      return v;
    }
    case VT::Boolean:
      if (text == "true" || text == "yes" || text == "on") return true;
      if (text == "false" || text == "no" || text == "off") return false;
      reject(spec, text, "not a boolean");
    case VT::Text: {
      if (text.empty()) reject(spec, text, "empty value");
      if (!spec.choices.empty()) {
        const auto options = split(spec.choices, '|');
        if (std::find(options.begin(), options.end(), text) == options.end()) {
          reject(spec, text, "unknown value");
        }
      }
      return std::string(text);
    }
    case VT::IntList: {
      std::vector<int> out;
      if (text.empty()) return out;
      for (auto item : split(text, ',')) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
          reject(spec, text, "not an integer list");
        }
        check_range(spec, text, v);
        out.push_back(v);
      }
      return out;
    }
    case VT::TextList: {
      std::vector<std::string> out;
      if (text.empty()) return out;
      for (auto item : split(text, ',')) {
        if (item.empty()) reject(spec, text, "empty list item");
        out.emplace_back(item);
      }
      return out;
    }
  }
  reject(spec, text, "unsupported type");
}

std::string format_value(const KeySpec& spec, const Value& value) {
  if (std::holds_alternative<std::monostate>(value)) return "none";
  switch (spec.type) {
    case VT::Time:
    case VT::Length:
    case VT::Speed:
    case VT::Attenuation:
    case VT::Rate: {
      const double v = std::get<double>(value);
      if (std::isinf(v)) return "inf";
      return shortest(v) + " " + std::string(canonical_unit(spec.type));
    }
    case VT::Real: return shortest(std::get<double>(value));
    case VT::Integer: return std::to_string(std::get<std::int64_t>(value));
    case VT::Boolean: return std::get<bool>(value) ? "true" : "false";
    case VT::Text: return std::get<std::string>(value);
    case VT::IntList: {
      std::string out;
      for (int v : std::get<std::vector<int>>(value)) {
        out += (out.empty() ? "" : ", ") + std::to_string(v);
      }
      return out;
    }
    case VT::TextList: {
      std::string out;
      for (const auto& v : std::get<std::vector<std::string>>(value)) {
        out += (out.empty() ? "" : ", ") + v;
      }
      return out;
    }
  }
  return "";
}

// ---------------------------------------------------------------------------

RunConfig::RunConfig() {
  for (const auto& spec : kSchema) values_[std::string(spec.key)] = parse_value(spec, spec.default_text);
}

namespace {

const KeySpec& require_key(std::string_view key) {
  const KeySpec* spec = find_key(key);
  if (!spec) {
    const auto dot = key.find('.');
    std::string accepted;
    if (dot != std::string_view::npos) {
      const auto section = key.substr(0, dot + 1);
      for (const auto& s : kSchema) {
        if (s.key.starts_with(section)) accepted += (accepted.empty() ? "" : ", ") + std::string(s.key);
      }
    }
    std::string msg = "unknown key '" + std::string(key) + "'";
    msg += accepted.empty() ? " (unknown section)" : "; accepted keys: " + accepted;
    throw ConfigError(std::string(key), msg);
  }
  return *spec;
}

template <class T>
const T& typed(const std::map<std::string, Value, std::less<>>& values, std::string_view key) {
  require_key(key);
  const auto& v = values.find(key)->second;
  if (const T* p = std::get_if<T>(&v)) return *p;
  throw ConfigError(std::string(key), "key '" + std::string(key) + "' is not set");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view text) {
  const KeySpec& spec = require_key(key);
  values_.find(key)->second = parse_value(spec, text);
}

void RunConfig::set_value(std::string_view key, Value value) {
  const KeySpec& spec = require_key(key);
  // Re-parse through the canonical text so range checks apply.
  values_.find(key)->second = parse_value(spec, format_value(spec, value));
}

const Value& RunConfig::get(std::string_view key) const {
  require_key(key);
  return values_.find(key)->second;
}

bool RunConfig::has(std::string_view key) const {
  return !std::holds_alternative<std::monostate>(get(key));
}

double RunConfig::number(std::string_view key) const { return typed<double>(values_, key); }
std::int64_t RunConfig::integer(std::string_view key) const {
  return typed<std::int64_t>(values_, key);
}
bool RunConfig::boolean(std::string_view key) const { return typed<bool>(values_, key); }
const std::string& RunConfig::text(std::string_view key) const {
  return typed<std::string>(values_, key);
}
const std::vector<int>& RunConfig::int_list(std::string_view key) const {
  return typed<std::vector<int>>(values_, key);
}
const std::vector<std::string>& RunConfig::text_list(std::string_view key) const {
  return typed<std::vector<std::string>>(values_, key);
}
std::optional<double> RunConfig::optional_number(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::string RunConfig::serialize() const {
  std::string out;
  std::string_view section;
  for (const auto& spec : kSchema) {
    const auto dot = spec.key.find('.');
    const auto sec = spec.key.substr(0, dot);
    if (sec != section) {
      if (!out.empty()) out += "\n";
      out += "[" + std::string(sec) + "]\n";
      section = sec;
    }
    out += std::string(spec.key.substr(dot + 1)) + " = " +
           format_value(spec, values_.find(spec.key)->second) + "\n";
  }
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------

std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("IONMUX_PRESET_DIR"); env && *env) return env;
  return IONMUX_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_directory(), ec)) {
    if (entry.path().extension() == ".cfg") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

namespace {

struct Assignment {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<Assignment> parse_assignments(std::string_view text, std::string_view source) {
  std::vector<Assignment> out;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("", where + ": malformed section header '" + std::string(line) + "'");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", where + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    std::string key(trim(line.substr(0, eq)));
    if (key.find('.') == std::string::npos) {
      if (section.empty()) {
        throw ConfigError(key, where + ": key '" + key + "' outside any [section]");
      }
      key = section + "." + key;
    }
    out.push_back({key, std::string(trim(line.substr(eq + 1))), line_no});
  }
  return out;
}

RunConfig apply_text(std::string_view text, const RunConfig& base, std::string_view source,
                     int depth);

RunConfig preset_at(std::string_view name, const RunConfig& base, int depth) {
  if (depth > kMaxPresetDepth) {
    throw ConfigError("scenario.preset", "preset nesting deeper than " +
                                             std::to_string(kMaxPresetDepth));
  }
  if (name.empty() || name.find('/') != std::string_view::npos ||
      name.find("..") != std::string_view::npos) {
    throw ConfigError("scenario.preset", "invalid preset name '" + std::string(name) + "'");
  }
  const auto path = preset_directory() / (std::string(name) + ".cfg");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("scenario.preset",
                      "unknown preset '" + std::string(name) + "'; available: " + known);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig config = apply_text(ss.str(), base, path.string(), depth + 1);
  config.set("scenario.preset", name);
  return config;
}

RunConfig apply_text(std::string_view text, const RunConfig& base, std::string_view source,
                     int depth) {
  const auto assignments = parse_assignments(text, source);
  RunConfig config = base;
  for (const auto& a : assignments) {
    if (a.key == "scenario.preset" && a.value != "none") {
      config = preset_at(a.value, base, depth);
    }
  }
  for (const auto& a : assignments) {
    try {
      config.set(a.key, a.value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), std::string(source) + ":" + std::to_string(a.line) + ": " +
                                     e.what());
    }
  }
  return config;
}

}  // namespace

RunConfig parse_config_text(std::string_view text, const RunConfig& base, std::string_view source) {
  return apply_text(text, base, source, 0);
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base, path.string());
}

RunConfig load_preset(std::string_view name, const RunConfig& base) {
  return preset_at(name, base, 0);
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("", "override '" + std::string(assignment) + "' is not key=value");
  }
  config.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

// ---------------------------------------------------------------------------

AtomicParams atomic_params(const RunConfig& c) {
  AtomicParams p;
  p.p_br_d = c.number("atomic.p_br_d");
  p.w_up = c.number("atomic.w_up");
  p.tau_p = c.number("atomic.tau_p");
  p.validate();
  return p;
}

Strategy strategy(const RunConfig& c) {
  const auto& name = c.text("strategy.name");
  const int pulses = static_cast<int>(c.integer("strategy.pulses"));
  const double window = c.number("strategy.window");
  const auto& pumps = c.int_list("strategy.pump_after");
  if (name == "custom") return Strategy::custom(pulses, pumps, window);
  if (!pumps.empty()) {
    throw ConfigError("strategy.pump_after",
                      "strategy.pump_after only applies when strategy.name = custom");
  }
  return Strategy::named(name, pulses, window);
}

ProtocolSpec protocol_spec(const RunConfig& c) {
  ProtocolSpec s;
  s.name = c.has("scenario.preset") ? c.text("scenario.preset") : "custom";
  s.ions = static_cast<int>(c.integer("protocol.ions"));
  s.per_ion_strategy = strategy(c);
  s.timing.pulse_interval = c.number("timing.pulse_interval");
  s.timing.pump_time = c.number("timing.pump");
  s.atomic = atomic_params(c);
  s.initial_pump_time = c.number("timing.initial_pump");
  s.shelve_time = c.number("timing.shelve");
  s.shuttle_time = c.number("protocol.shuttle_time");
  s.shuttle_plan = c.int_list("protocol.shuttle_plan");
  s.return_shuttle = c.boolean("protocol.return_shuttle");
  s.cooling.duration = c.number("cooling.duration");
  s.cooling.every_k_rounds = static_cast<int>(c.integer("cooling.every"));
  s.length = c.number("link.length");
  s.c_fiber = c.number("link.c_fiber");
  s.comm_overhead = c.number("link.comm_overhead");
  s.t_ovh = c.optional_number("link.t_ovh");
  s.efficiencies.collection = c.number("efficiency.collection");
  s.efficiencies.conversion = c.number("efficiency.conversion");
  s.efficiencies.attenuation_db_per_km = c.number("efficiency.attenuation");
  s.efficiencies.detector = c.number("efficiency.detector");
  s.efficiencies.other = c.number("efficiency.other");
  s.memory.a = c.number("memory.a");
  s.memory.tau_coh = c.number("memory.tau_coh");
  s.memory.tau_life = c.number("memory.tau_life");
  s.survival = c.optional_number("memory.survival");
  s.target_success_rate = c.optional_number("calibration.target_rate");
  s.validate();
  return s;
}

NodePair node_pair(const RunConfig& c) {
  NodePair pair;
  pair.a = protocol_spec(c);
  pair.a.target_success_rate.reset();
  pair.b = pair.a;
  pair.bsm_efficiency = c.number("bsm.efficiency");
  pair.validate();
  return pair;
}

LinkParams link_params(const RunConfig& c) {
  LinkParams l;
  l.length = c.number("link.length");
  l.c_fiber = c.number("link.c_fiber");
  l.t_ovh = c.has("link.t_ovh") ? c.number("link.t_ovh") : c.number("link.comm_overhead");
  l.dt = c.number("link.dt");
  l.modes = static_cast<int>(c.integer("link.n_max"));
  l.validate();
  return l;
}

OptimizationProblem optimization_problem(const RunConfig& c) {
  OptimizationProblem p;
  p.pulses = static_cast<int>(c.integer("optimize.pulses"));
  p.objective = objective_from_string(c.text("optimize.objective"));
  p.window = c.number("strategy.window");
  p.pulse_interval = c.number("timing.pulse_interval");
  if (p.pulse_interval <= 0.0) p.pulse_interval = std::isfinite(p.window) ? p.window : 200e-9;
  p.pump_duration = c.number("timing.pump");
  p.params = atomic_params(c);
  p.validate();
  return p;
}

}  // namespace ionmux
