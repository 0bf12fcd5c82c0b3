#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ionmux/atomic_model.hpp"
#include "ionmux/pulse_program.hpp"

namespace ionmux {

struct Residuals {
  double s_up = 0.0;
  double s_down = 0.0;
  double excited = 0.0;
  double d_leak = 0.0;
  double d_shelf = 0.0;

  double sum() const { return s_up + s_down + excited + d_leak + d_shelf; }
};

/// Collected-photon probability per mode (before external efficiencies).
struct EmissionProfile {
  std::vector<int> modes;
  std::vector<double> per_mode;
  double total = 0.0;
  Residuals residuals;
};

struct ProgramRun {
  std::vector<PopulationVector> trajectory;
  EmissionProfile profile;
};

/// Applies every population primitive of `program` (restricted to `ion` when
/// given) to `initial`. A multi-ion program requires `ion`.
/// Throws NumericError if total population drifts by more than 1e-9.
ProgramRun run_program(const PopulationVector& initial, const PulseProgram& program,
                       std::optional<int> ion = std::nullopt);

/// Emission profile extracted from a final population for the given modes.
EmissionProfile extract_profile(const PopulationVector& final_state, const std::vector<int>& modes);

/// Total collected emission of `strategy` starting from pure S_up.
double effective_branching_ratio(const Strategy& strategy, const AtomicParams& params);

/// Pulse count used for "infinitely many pulses" limits.
inline constexpr int kAsymptoticPulses = 200;

/// BR at N = 200 together with the convergence gap |BR(200) - BR(199)|.
struct AsymptoticBranchingRatio {
  double value = 0.0;
  double gap = 0.0;
};
AsymptoticBranchingRatio asymptotic_branching_ratio(const Strategy& pattern,
                                                    const AtomicParams& params);

/// Absorption probabilities when `map` is applied repeatedly from `start`,
/// via the fundamental matrix of the transient block. Absorbing states are
/// the levels the map leaves fixed. Throws AnalysisError when the transient
/// block has spectral radius >= 1 - 1e-12.
std::map<Level, double> absorbing_distribution(const TransitionMap& map, Level start);

}  // namespace ionmux
