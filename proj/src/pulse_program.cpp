#include "ionmux/pulse_program.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ionmux/errors.hpp"

namespace ionmux {

namespace {

// Relative slack for floating-point accumulation of timestamps.
constexpr double kTimeSlack = 1e-12;

}  // namespace

std::string_view to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::InitialPump: return "initial_pump";
    case PrimitiveKind::Excite: return "excite";
    case PrimitiveKind::Pump: return "pump";
    case PrimitiveKind::ShelveTo: return "shelve_to";
    case PrimitiveKind::ShelveFrom: return "shelve_from";
    case PrimitiveKind::Wait: return "wait";
    case PrimitiveKind::Shuttle: return "shuttle";
    case PrimitiveKind::Cooling: return "cooling";
    case PrimitiveKind::RoundTrip: return "round_trip";
    case PrimitiveKind::Overhead: return "overhead";
  }
  return "?";
}

bool acts_on_population(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::InitialPump:
    case PrimitiveKind::Excite:
    case PrimitiveKind::Pump:
    case PrimitiveKind::ShelveTo:
    case PrimitiveKind::ShelveFrom:
    case PrimitiveKind::Wait:
      return true;
    default:
      return false;
  }
}

bool applies_to(const Primitive& p, std::optional<int> ion) {
  if (!acts_on_population(p.kind)) return false;
  return !ion || p.ion < 0 || p.ion == *ion;
}

PulseProgram::PulseProgram(AtomicParams params) : params_(params) { params_.validate(); }

void PulseProgram::append(const Primitive& primitive) {
  if (!(std::isfinite(primitive.start) && std::isfinite(primitive.duration)) ||
      primitive.duration < 0.0) {
    throw ProtocolError("primitive '" + std::string(to_string(primitive.kind)) +
                        "' has an invalid start or duration");
  }
  const double end = end_time();
  if (primitive.start < end - kTimeSlack * std::max(1.0, std::abs(end)) - 1e-18) {
    throw ProtocolError("primitive '" + std::string(to_string(primitive.kind)) +
                        "' overlaps the previous primitive");
  }
  if (primitive.kind == PrimitiveKind::Excite) {
    if (primitive.mode <= last_mode_) {
      throw ProtocolError("mode indices must be strictly increasing (got " +
                          std::to_string(primitive.mode) + " after " +
                          std::to_string(last_mode_) + ")");
    }
    if (std::isnan(primitive.window) || primitive.window <= 0.0) {
      throw ParameterError("excitation window must be positive or infinite");
    }
    last_mode_ = primitive.mode;
  }
  if (acts_on_population(primitive.kind) && primitive.ion < 0 &&
      primitive.kind != PrimitiveKind::InitialPump) {
    throw ProtocolError("population primitive without a target ion");
  }
  primitives_.push_back(primitive);
}

const Primitive& PulseProgram::push(PrimitiveKind kind, double duration, int ion) {
  Primitive p;
  p.kind = kind;
  p.start = end_time();
  p.duration = duration;
  p.ion = acts_on_population(kind) || ion < 0 ? ion : -1;
  append(p);
  return primitives_.back();
}

const Primitive& PulseProgram::push_excite(double duration, double window, int ion) {
  Primitive p;
  p.kind = PrimitiveKind::Excite;
  p.start = end_time();
  p.duration = duration;
  p.ion = ion;
  p.mode = next_mode();
  p.window = window;
  append(p);
  return primitives_.back();
}

double PulseProgram::end_time() const {
  return primitives_.empty() ? 0.0 : primitives_.back().end();
}

int PulseProgram::mode_count() const {
  return static_cast<int>(std::count_if(primitives_.begin(), primitives_.end(), [](const auto& p) {
    return p.kind == PrimitiveKind::Excite;
  }));
}

std::vector<int> PulseProgram::ions() const {
  std::set<int> ions;
  for (const auto& p : primitives_) {
    if (acts_on_population(p.kind) && p.ion >= 0) ions.insert(p.ion);
  }
  return {ions.begin(), ions.end()};
}

std::vector<int> PulseProgram::modes(std::optional<int> ion) const {
  std::vector<int> out;
  for (const auto* p : excitations(ion)) out.push_back(p->mode);
  return out;
}

std::vector<const Primitive*> PulseProgram::excitations(std::optional<int> ion) const {
  std::vector<const Primitive*> out;
  for (const auto& p : primitives_) {
    if (p.kind == PrimitiveKind::Excite && (!ion || p.ion == *ion)) out.push_back(&p);
  }
  return out;
}

std::optional<TransitionMap> PulseProgram::map_for(const Primitive& primitive) const {
  switch (primitive.kind) {
    case PrimitiveKind::InitialPump: return reset_map();
    case PrimitiveKind::Excite: return excitation_map(params_, primitive.window, primitive.mode);
    case PrimitiveKind::Pump: return pump_map(params_);
    case PrimitiveKind::ShelveTo: return shelve_map(ShelveDirection::ToShelf);
    case PrimitiveKind::ShelveFrom: return shelve_map(ShelveDirection::FromShelf);
    case PrimitiveKind::Wait: return wait_map(params_, primitive.duration);
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> pattern_pumps(Strategy::Pattern pattern, int pulses) {
  std::vector<int> pumps;
  switch (pattern) {
    case Strategy::Pattern::None:
    case Strategy::Pattern::Custom:
      break;
    case Strategy::Pattern::Every:
      for (int i = 1; i <= pulses; ++i) pumps.push_back(i);
      break;
    case Strategy::Pattern::Block4:
      for (int i = 4; i < pulses; i += 4) pumps.push_back(i);
      break;
    case Strategy::Pattern::Block3322: {
      // Two groups of three, then groups of two.
      int i = 0;
      for (int group = 0;; ++group) {
        i += group < 2 ? 3 : 2;
        if (i >= pulses) break;
        pumps.push_back(i);
      }
      break;
    }
  }
  return pumps;
}

}  // namespace

Strategy Strategy::named(std::string_view name, std::optional<int> pulses, double window) {
  Strategy s;
  s.window = window;
  if (name == "none") {
    s.pattern = Pattern::None;
    s.pulse_count = pulses.value_or(1);
  } else if (name == "every") {
    s.pattern = Pattern::Every;
    s.pulse_count = pulses.value_or(1);
  } else if (name == "block-4") {
    s.pattern = Pattern::Block4;
    s.pulse_count = pulses.value_or(8);
  } else if (name == "block-3322") {
    s.pattern = Pattern::Block3322;
    s.pulse_count = pulses.value_or(12);
  } else {
    throw ParameterError("unknown strategy '" + std::string(name) +
                         "' (expected none, every, block-4, block-3322)");
  }
  s.pump_after = pattern_pumps(s.pattern, s.pulse_count);
  s.validate();
  return s;
}

Strategy Strategy::custom(int pulses, std::vector<int> pump_after, double window) {
  Strategy s;
  s.pulse_count = pulses;
  std::sort(pump_after.begin(), pump_after.end());
  pump_after.erase(std::unique(pump_after.begin(), pump_after.end()), pump_after.end());
  s.pump_after = std::move(pump_after);
  s.window = window;
  s.validate();
  return s;
}

Strategy Strategy::resized(int pulses) const {
  Strategy s = *this;
  s.pulse_count = pulses;
  if (pattern == Pattern::Custom) {
    std::erase_if(s.pump_after, [pulses](int i) { return i > pulses; });
  } else {
    s.pump_after = pattern_pumps(pattern, pulses);
  }
  s.validate();
  return s;
}

std::string Strategy::name() const {
  switch (pattern) {
    case Pattern::None: return "none";
    case Pattern::Every: return "every";
    case Pattern::Block4: return "block-4";
    case Pattern::Block3322: return "block-3322";
    case Pattern::Custom: break;
  }
  return "custom";
}

bool Strategy::pumps_after(int pulse) const {
  return std::binary_search(pump_after.begin(), pump_after.end(), pulse);
}

void Strategy::validate() const {
  if (pulse_count < 1) throw ParameterError("strategy needs at least one pulse");
  if (std::isnan(window) || window <= 0.0) {
    throw ParameterError("strategy window must be positive or infinite");
  }
  for (std::size_t i = 0; i < pump_after.size(); ++i) {
    const int k = pump_after[i];
    if (k < 1 || k > pulse_count) {
      throw ParameterError("pump_after index " + std::to_string(k) + " outside 1.." +
                           std::to_string(pulse_count));
    }
    if (i > 0 && pump_after[i - 1] >= k) {
      throw ParameterError("pump_after must be strictly increasing");
    }
  }
}

void append_train(PulseProgram& program, const Strategy& strategy, const TrainTiming& timing,
                  int ion) {
  strategy.validate();
  double interval = timing.pulse_interval;
  if (interval <= 0.0) interval = std::isfinite(strategy.window) ? strategy.window : 200e-9;
  for (int pulse = 1; pulse <= strategy.pulse_count; ++pulse) {
    program.push_excite(interval, strategy.window, ion);
    if (strategy.pumps_after(pulse)) program.push(PrimitiveKind::Pump, timing.pump_time, ion);
  }
}

PulseProgram compile_strategy(const Strategy& strategy, const AtomicParams& params,
                              const TrainTiming& timing) {
  PulseProgram program(params);
  append_train(program, strategy, timing);
  return program;
}

}  // namespace ionmux
