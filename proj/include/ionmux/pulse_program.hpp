#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ionmux/atomic_model.hpp"

namespace ionmux {

enum class PrimitiveKind {
  InitialPump,  // repumped reset to S_up
  Excite,       // excitation pulse + detection window (one time-bin mode)
  Pump,         // intermediate optical pumping, no repumper
  ShelveTo,
  ShelveFrom,
  Wait,         // free decay, nothing collected
  Shuttle,      // timeline only
  Cooling,      // timeline only (amortized per round)
  RoundTrip,    // timeline only: heralding signal travel 2L/c
  Overhead,     // timeline only: control-system communication
};

std::string_view to_string(PrimitiveKind kind);
bool acts_on_population(PrimitiveKind kind);

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Wait;
  double start = 0.0;
  double duration = 0.0;
  int ion = 0;                       // -1: all ions (initial pump) or timeline only
  int mode = -1;                     // Excite only
  double window = kInfiniteWindow;   // Excite only: decay window seen by the physics

  double end() const { return start + duration; }
};

/// True when `p` changes the population of `ion` (any ion when nullopt).
bool applies_to(const Primitive& p, std::optional<int> ion);

/// Timestamped primitive sequence for one round of attempts. Primitives are
/// appended in time order; overlapping primitives and non-increasing mode
/// indices are rejected with ProtocolError.
class PulseProgram {
 public:
  explicit PulseProgram(AtomicParams params = {});

  const AtomicParams& params() const { return params_; }
  const std::vector<Primitive>& primitives() const { return primitives_; }
  bool empty() const { return primitives_.empty(); }

  void append(const Primitive& primitive);
  /// Appends at the current end of the timeline and returns the new primitive.
  const Primitive& push(PrimitiveKind kind, double duration, int ion = 0);
  const Primitive& push_excite(double duration, double window, int ion = 0);

  double end_time() const;
  int mode_count() const;
  int next_mode() const { return last_mode_ + 1; }
  /// Ions touched by population primitives, ascending.
  std::vector<int> ions() const;
  /// Mode indices (ascending) produced by `ion`, or by all ions.
  std::vector<int> modes(std::optional<int> ion = std::nullopt) const;
  std::vector<const Primitive*> excitations(std::optional<int> ion = std::nullopt) const;

  /// Builds the population map of a primitive; nullopt for timeline-only kinds.
  std::optional<TransitionMap> map_for(const Primitive& primitive) const;

 private:
  AtomicParams params_;
  std::vector<Primitive> primitives_;
  int last_mode_ = -1;
};

/// Pump-insertion strategy for a train of `pulse_count` excitations.
struct Strategy {
  enum class Pattern { Custom, None, Every, Block4, Block3322 };

  int pulse_count = 1;
  std::vector<int> pump_after;  // 1-based pulse indices, ascending, unique
  double window = kInfiniteWindow;
  Pattern pattern = Pattern::Custom;

  /// "none", "every" (pump after every pulse), "block-4" (pump every 4
  /// pulses, 8 by default) or "block-3322" (groups 3-3-2-2-..., 12 by default).
  static Strategy named(std::string_view name, std::optional<int> pulses = std::nullopt,
                        double window = kInfiniteWindow);
  static Strategy custom(int pulses, std::vector<int> pump_after,
                         double window = kInfiniteWindow);

  /// Same pattern regenerated for `pulses` (custom patterns are truncated).
  Strategy resized(int pulses) const;
  std::string name() const;
  int pump_count() const { return static_cast<int>(pump_after.size()); }
  bool pumps_after(int pulse) const;
  void validate() const;
};

struct TrainTiming {
  double pulse_interval = 0.0;  // 0 = use the window if finite, else 200 ns
  double pump_time = 100e-9;
};

/// Appends the excitation train of `strategy` for `ion` to `program`.
void append_train(PulseProgram& program, const Strategy& strategy, const TrainTiming& timing,
                  int ion = 0);

/// Single-ion program consisting of the strategy's train only.
PulseProgram compile_strategy(const Strategy& strategy, const AtomicParams& params,
                              const TrainTiming& timing = {});

}  // namespace ionmux
