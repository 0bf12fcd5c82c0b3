#pragma once

#include <string_view>
#include <vector>

#include "ionmux/atomic_model.hpp"
#include "ionmux/pulse_program.hpp"

namespace ionmux {

enum class Objective { TotalEmission, EmissionRate };

std::string_view to_string(Objective objective);
Objective objective_from_string(std::string_view name);

struct OptimizationProblem {
  int pulses = 1;
  Objective objective = Objective::TotalEmission;
  double pulse_interval = 200e-9;
  double pump_duration = 100e-9;
  double window = kInfiniteWindow;
  AtomicParams params;

  void validate() const;
};

struct FrontierEntry {
  int pumps = 0;
  Strategy strategy;
  double value = 0.0;
};

struct OptimizationResult {
  Strategy best;
  double value = 0.0;
  /// Best strategy for each pump count 0..N-1 (a pump after the last pulse is
  /// never useful and is not listed).
  std::vector<FrontierEntry> frontier;
};

/// Largest N accepted by solve_exhaustive.
inline constexpr int kExhaustiveLimit = 20;

/// Objective value of a strategy: total collected emission, or that divided
/// by N * pulse_interval + pumps * pump_duration.
double objective_value(const OptimizationProblem& problem, const Strategy& strategy);

/// Enumerates all 2^N pump subsets. Ties go to fewer pumps, then to the
/// lexicographically earliest pump positions. Throws BudgetError for N > 20.
OptimizationResult solve_exhaustive(const OptimizationProblem& problem);

/// Dynamic program over (pulse index, pumps used). After a pump the ion is
/// back to a multiple of pure S_up, so each pump-delimited segment is scored
/// once per length. Same tie-breaking as solve_exhaustive.
OptimizationResult solve_dp(const OptimizationProblem& problem);

}  // namespace ionmux
