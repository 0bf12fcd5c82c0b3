#pragma once

// Level scheme and primitive transition maps of the multiple-excitation
// scheme on a single communication ion.
//
// Levels are aggregated per manifold: S_up / S_down are the two ground
// Zeeman sublevels, P the excited level, and the metastable manifold is split
// by history into D_photon (decayed inside a detection window), D_leak
// (decayed outside one, photon not collected) and D_shelf (moved to the
// second metastable shelf). All times are in seconds.

#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ionmux {

inline constexpr double kInfiniteWindow = std::numeric_limits<double>::infinity();

struct AtomicParams {
  double p_br_d = 0.06;        // P -> D branching (collected-photon channel)
  double w_up = 2.0 / 3.0;     // ground-manifold decay weight back to S_up
  double tau_p = 7e-9;         // excited-level 1/e lifetime

  double p_br_s() const { return 1.0 - p_br_d; }
  double w_down() const { return 1.0 - w_up; }

  /// Throws ParameterError when a probability leaves [0,1] or tau_p <= 0.
  void validate() const;
};

enum class Level : int { SUp = 0, SDown, P, DPhoton, DLeak, DShelf };

inline constexpr std::size_t kLevelCount = 6;
inline constexpr std::array<Level, kLevelCount> kAllLevels = {
    Level::SUp, Level::SDown, Level::P, Level::DPhoton, Level::DLeak, Level::DShelf};

std::string_view to_string(Level level);
constexpr std::size_t index(Level level) { return static_cast<std::size_t>(level); }
constexpr bool is_metastable(Level level) {
  return level == Level::DPhoton || level == Level::DLeak || level == Level::DShelf;
}

/// Population over the level set. D_photon mass is tallied per mode index;
/// shelved population remembers the split it came from so unshelving is exact.
class PopulationVector {
 public:
  struct ShelfRecord {
    std::map<int, double> photon;
    double leak = 0.0;
  };

  PopulationVector() = default;

  static PopulationVector pure(Level level, int mode = 0);

  double s_up = 0.0;
  double s_down = 0.0;
  double excited = 0.0;
  double d_leak = 0.0;
  std::map<int, double> photon;
  std::optional<ShelfRecord> shelf;

  /// Aggregate mass of a level (D_photon summed over modes).
  double operator[](Level level) const;
  double total() const;
  /// Photon tally of a mode, whether currently in D_photon or shelved.
  double photon_in_mode(int mode) const;
  bool has_tally(int mode) const;
};

enum class MapKind { Excite, Pump, PumpCycle, ShelveTo, ShelveFrom, Wait, Reset };

std::string_view to_string(MapKind kind);

using LevelMatrix = std::array<std::array<double, kLevelCount>, kLevelCount>;

/// Row-stochastic map on the aggregated level basis. Row = source level,
/// column = destination. New D_photon mass produced from S/P rows is tallied
/// into `mode()`. Metastable rows act on tallies according to the kind: fixed
/// points for optical primitives, moved to / restored from the shelf record for
/// shelving, and returned to S_up by a reset.
class TransitionMap {
 public:
  TransitionMap(MapKind kind, const LevelMatrix& matrix, int mode = -1);

  MapKind kind() const { return kind_; }
  int mode() const { return mode_; }
  const LevelMatrix& matrix() const { return matrix_; }
  double operator()(Level from, Level to) const { return matrix_[index(from)][index(to)]; }

  /// Throws ProtocolError on a mode collision or unshelve without a record.
  PopulationVector apply(const PopulationVector& in) const;

 private:
  MapKind kind_;
  LevelMatrix matrix_;
  int mode_;
};

/// One excitation pulse followed by a detection window of length `window`
/// (kInfiniteWindow for a fully resolved decay). Undecayed excited population
/// is held in P and flipped back to S_up by the next pulse.
TransitionMap excitation_map(const AtomicParams& params, double window, int mode_index);

/// Intermediate optical pumping as its absorbing closure: S_down ends in
/// S_up with p_br_S*w_down/(p_br_S*w_down + p_br_D), otherwise in D_leak.
TransitionMap pump_map(const AtomicParams& params);

/// One scattering cycle of the intermediate pump; pump_map is its absorbing limit.
TransitionMap pump_cycle_map(const AtomicParams& params);

enum class ShelveDirection { ToShelf, FromShelf };
TransitionMap shelve_map(ShelveDirection direction);

/// Free evolution for `duration`: P decays, emission is not collected.
TransitionMap wait_map(const AtomicParams& params, double duration);

/// Initial pumping with repumper on: everything returns to S_up.
TransitionMap reset_map();

/// Closed-form absorbing split of the pump (fraction returned to S_up).
double pump_return_fraction(const AtomicParams& params);

/// Fraction of excited population that decays within `window`.
double decayed_fraction(const AtomicParams& params, double window);

}  // namespace ionmux
