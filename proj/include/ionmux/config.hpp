#pragma once

// Run configuration: an INI-style text format with unit-suffixed numbers.
//
//   # comment
//   [link]
//   length = 12 km
//   t_ovh  = 50 us
//
// Every key belongs to a fixed schema; unknown keys, missing or wrong units
// and out-of-range values raise ConfigError naming the key.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ionmux/bsm.hpp"
#include "ionmux/protocol.hpp"
#include "ionmux/strategy_optimizer.hpp"

namespace ionmux {

enum class ValueType { Time, Length, Speed, Attenuation, Rate, Real, Integer, Boolean, Text, IntList, TextList };

struct KeySpec {
  std::string_view key;  // "section.name"
  ValueType type;
  double min;
  double max;
  bool min_exclusive;
  bool allow_inf;
  bool optional;  // may be "none"
  std::string_view default_text;
  std::string_view choices;  // '|' separated, Text only
};

/// Full schema in canonical order.
const std::vector<KeySpec>& config_schema();
const KeySpec* find_key(std::string_view key);

using Value = std::variant<std::monostate, double, std::int64_t, bool, std::string, std::vector<int>,
                           std::vector<std::string>>;

/// Parses one value of `spec`'s type; throws ConfigError naming the key.
Value parse_value(const KeySpec& spec, std::string_view text);
/// Canonical text of a value (SI units, round-trip exact).
std::string format_value(const KeySpec& spec, const Value& value);

class RunConfig {
 public:
  /// Schema defaults, no preset applied.
  RunConfig();

  void set(std::string_view key, std::string_view text);
  void set_value(std::string_view key, Value value);
  const Value& get(std::string_view key) const;
  bool has(std::string_view key) const;  // false for "none"

  double number(std::string_view key) const;
  std::int64_t integer(std::string_view key) const;
  bool boolean(std::string_view key) const;
  const std::string& text(std::string_view key) const;
  const std::vector<int>& int_list(std::string_view key) const;
  const std::vector<std::string>& text_list(std::string_view key) const;
  std::optional<double> optional_number(std::string_view key) const;

  /// Canonical text; parse_config_text(serialize()) reproduces this config.
  std::string serialize() const;
  /// FNV-1a 64 of serialize().
  std::uint64_t hash() const;

  bool operator==(const RunConfig& other) const { return values_ == other.values_; }

 private:
  std::map<std::string, Value, std::less<>> values_;
};

/// Directory searched for "<name>.cfg" presets: $IONMUX_PRESET_DIR, else the
/// directory configured at build time.
std::filesystem::path preset_directory();
std::vector<std::string> preset_names();

/// Applies `text` on top of `base`. A `scenario.preset` assignment loads that
/// preset first and then applies the remaining assignments of the text.
RunConfig parse_config_text(std::string_view text, const RunConfig& base = RunConfig(),
                            std::string_view source = "<text>");
RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = RunConfig());
RunConfig load_preset(std::string_view name, const RunConfig& base = RunConfig());

/// Splits "key=value" and applies it.
void apply_override(RunConfig& config, std::string_view assignment);

// Builders from a resolved config.
AtomicParams atomic_params(const RunConfig& config);
Strategy strategy(const RunConfig& config);
ProtocolSpec protocol_spec(const RunConfig& config);
NodePair node_pair(const RunConfig& config);
LinkParams link_params(const RunConfig& config);
OptimizationProblem optimization_problem(const RunConfig& config);

}  // namespace ionmux
