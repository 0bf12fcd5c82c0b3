#include "ionmux/strategy_optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ionmux/errors.hpp"

namespace ionmux {

namespace {

// Relative tolerance under which two objective values count as a tie.
constexpr double kTieTolerance = 1e-12;

bool better(double candidate, double incumbent) {
  return candidate > incumbent + kTieTolerance * std::max(1.0, std::abs(incumbent));
}
bool tied(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Transient part (S_up, S_down, P) of the excitation and pump maps plus the
// excitation's emission column; metastable rows are fixed points for both.
struct TrainEvaluator {
  double ex[3][3];
  double ex_emit[3];
  double pump[3][3];

  explicit TrainEvaluator(const OptimizationProblem& problem) {
    const auto excite = excitation_map(problem.params, problem.window, 0).matrix();
    const auto pumped = pump_map(problem.params).matrix();
    constexpr Level kTransient[3] = {Level::SUp, Level::SDown, Level::P};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ex[i][j] = excite[index(kTransient[i])][index(kTransient[j])];
        pump[i][j] = pumped[index(kTransient[i])][index(kTransient[j])];
      }
      ex_emit[i] = excite[index(kTransient[i])][index(Level::DPhoton)];
    }
  }

  struct State {
    double x[3] = {1.0, 0.0, 0.0};
    double emitted = 0.0;
  };

  void excite(State& s) const {
    double y[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
      s.emitted += s.x[i] * ex_emit[i];
      for (int j = 0; j < 3; ++j) y[j] += s.x[i] * ex[i][j];
    }
    std::copy(y, y + 3, s.x);
  }

  void apply_pump(State& s) const {
    double y[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) y[j] += s.x[i] * pump[i][j];
    }
    std::copy(y, y + 3, s.x);
  }

  // Bit i of `mask` set = pump after pulse i+1.
  double total(int pulses, std::uint32_t mask) const {
    State s;
    for (int i = 0; i < pulses; ++i) {
      excite(s);
      if (mask & (1u << i)) apply_pump(s);
    }
    return s.emitted;
  }
};

double round_time(const OptimizationProblem& problem, int pumps) {
  return problem.pulses * problem.pulse_interval + pumps * problem.pump_duration;
}

double to_objective(const OptimizationProblem& problem, double emission, int pumps) {
  if (problem.objective == Objective::TotalEmission) return emission;
  return emission / round_time(problem, pumps);
}

std::vector<int> positions(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i) {
    if (mask & (1u << i)) out.push_back(i + 1);
  }
  return out;
}

OptimizationResult assemble(const OptimizationProblem& problem,
                            const std::vector<std::vector<int>>& pumps_by_count,
                            const std::vector<double>& emission_by_count) {
  OptimizationResult result;
  bool have = false;
  for (std::size_t j = 0; j < pumps_by_count.size(); ++j) {
    if (std::isnan(emission_by_count[j])) continue;
    const int pumps = static_cast<int>(j);
    FrontierEntry entry{pumps,
                        Strategy::custom(problem.pulses, pumps_by_count[j], problem.window),
                        to_objective(problem, emission_by_count[j], pumps)};
    // Entries arrive in ascending pump count, so a tie keeps the fewer-pump one.
    if (!have || better(entry.value, result.value)) {
      result.best = entry.strategy;
      result.value = entry.value;
      have = true;
    }
    result.frontier.push_back(std::move(entry));
  }
  return result;
}

}  // namespace

std::string_view to_string(Objective objective) {
  return objective == Objective::TotalEmission ? "total_emission" : "emission_rate";
}

Objective objective_from_string(std::string_view name) {
  if (name == "total_emission") return Objective::TotalEmission;
  if (name == "emission_rate") return Objective::EmissionRate;
  throw ParameterError("unknown objective '" + std::string(name) +
                       "' (expected total_emission or emission_rate)");
}

void OptimizationProblem::validate() const {
  if (pulses < 1) throw ParameterError("pulse budget N must be >= 1");
  if (!(pulse_interval > 0.0)) throw ParameterError("pulse_interval must be > 0");
  if (!(pump_duration > 0.0)) throw ParameterError("pump_duration must be > 0");
  if (std::isnan(window) || window <= 0.0) throw ParameterError("window must be > 0");
  params.validate();
}

double objective_value(const OptimizationProblem& problem, const Strategy& strategy) {
  problem.validate();
  const TrainEvaluator eval(problem);
  TrainEvaluator::State s;
  for (int i = 1; i <= strategy.pulse_count; ++i) {
    eval.excite(s);
    if (strategy.pumps_after(i)) eval.apply_pump(s);
  }
  return to_objective(problem, s.emitted, strategy.pump_count());
}

OptimizationResult solve_exhaustive(const OptimizationProblem& problem) {
  problem.validate();
  const int n = problem.pulses;
  if (n > kExhaustiveLimit) {
    throw BudgetError("exhaustive search is limited to N <= " + std::to_string(kExhaustiveLimit) +
                      " (got " + std::to_string(n) + "); use solve_dp");
  }
  const TrainEvaluator eval(problem);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // Pump counts 0..N-1. A mask with a pump after the last pulse equals the same
  // mask without it at one extra pump, so it can never win and is skipped.
  std::vector<double> best(static_cast<std::size_t>(n), nan);
  std::vector<std::vector<int>> best_pos(static_cast<std::size_t>(n));
  const std::uint32_t last = 1u << (n - 1);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (mask & last) continue;
    const auto j = static_cast<std::size_t>(std::popcount(mask));
    const double value = eval.total(n, mask);
    if (std::isnan(best[j]) || better(value, best[j])) {
      best[j] = value;
      best_pos[j] = positions(mask);
    } else if (tied(value, best[j])) {
      auto pos = positions(mask);
      if (pos < best_pos[j]) best_pos[j] = std::move(pos);
    }
  }
  return assemble(problem, best_pos, best);
}

OptimizationResult solve_dp(const OptimizationProblem& problem) {
  problem.validate();
  const int n = problem.pulses;
  const TrainEvaluator eval(problem);

  // Segment of `len` pulses from unit S_up: emission, and S_up left after a pump.
  std::vector<double> seg_emit(n + 1, 0.0);
  std::vector<double> seg_return(n + 1, 0.0);
  {
    TrainEvaluator::State s;
    for (int len = 1; len <= n; ++len) {
      eval.excite(s);
      seg_emit[len] = s.emitted;
      TrainEvaluator::State pumped = s;
      eval.apply_pump(pumped);
      seg_return[len] = pumped.x[0];
      if (pumped.x[1] > 1e-15 || pumped.x[2] > 1e-15) {
        throw NumericError("pump does not return the ion to S_up; DP state collapse invalid");
      }
    }
  }

  // best[k][j]: emission from pulses k+1..N, unit S_up after pulse k, j pumps.
  const double none = -1.0;
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(n, none));
  for (int k = n - 1; k >= 0; --k) {
    best[k][0] = seg_emit[n - k];
    for (int j = 1; j <= n - k - 1; ++j) {
      for (int m = k + 1; m <= n - 1; ++m) {
        if (best[m][j - 1] < 0.0) continue;
        const double v = seg_emit[m - k] + seg_return[m - k] * best[m][j - 1];
        if (v > best[k][j]) best[k][j] = v;
      }
    }
  }

  std::vector<double> emission(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::vector<int>> pumps_by_count(n);
  for (int j = 0; j < n; ++j) {
    if (best[0][j] < 0.0) continue;
    emission[j] = best[0][j];
    // Earliest pump position that still attains the optimum, left to right.
    int k = 0;
    for (int left = j; left > 0; --left) {
      for (int m = k + 1; m <= n - 1; ++m) {
        if (best[m][left - 1] < 0.0) continue;
        const double v = seg_emit[m - k] + seg_return[m - k] * best[m][left - 1];
        if (tied(v, best[k][left]) || v > best[k][left]) {
          pumps_by_count[j].push_back(m);
          k = m;
          break;
        }
      }
    }
  }
  return assemble(problem, pumps_by_count, emission);
}

}  // namespace ionmux
