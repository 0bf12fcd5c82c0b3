#include "ionmux/markov_engine.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ionmux/errors.hpp"

namespace ionmux {

namespace {

constexpr double kConservationTolerance = 1e-9;

}  // namespace

EmissionProfile extract_profile(const PopulationVector& final_state, const std::vector<int>& modes) {
  EmissionProfile profile;
  profile.modes = modes;
  profile.per_mode.reserve(modes.size());
  for (int mode : modes) {
    const double p = final_state.photon_in_mode(mode);
    profile.per_mode.push_back(p);
    profile.total += p;
  }
  profile.residuals.s_up = final_state.s_up;
  profile.residuals.s_down = final_state.s_down;
  profile.residuals.excited = final_state.excited;
  profile.residuals.d_leak = final_state.d_leak;
  profile.residuals.d_shelf = final_state[Level::DShelf];
  // Shelved photon tallies are already counted per mode.
  if (final_state.shelf) {
    for (const auto& [mode, p] : final_state.shelf->photon) profile.residuals.d_shelf -= p;
  }
  return profile;
}

ProgramRun run_program(const PopulationVector& initial, const PulseProgram& program,
                       std::optional<int> ion) {
  if (!ion && program.ions().size() > 1) {
    throw ProtocolError("multi-ion program: select the ion to evolve");
  }
  ProgramRun run;
  run.trajectory.push_back(initial);
  const double norm = initial.total();
  for (const auto& primitive : program.primitives()) {
    if (!applies_to(primitive, ion)) continue;
    auto map = program.map_for(primitive);
    run.trajectory.push_back(map->apply(run.trajectory.back()));
    const double drift = std::abs(run.trajectory.back().total() - norm);
    if (!(drift <= kConservationTolerance)) {
      throw NumericError("population not conserved after '" +
                         std::string(to_string(primitive.kind)) + "' (drift " +
                         std::to_string(drift) + ")");
    }
  }
  run.profile = extract_profile(run.trajectory.back(), program.modes(ion));
  return run;
}

double effective_branching_ratio(const Strategy& strategy, const AtomicParams& params) {
  const auto program = compile_strategy(strategy, params);
  return run_program(PopulationVector::pure(Level::SUp), program).profile.total;
}

AsymptoticBranchingRatio asymptotic_branching_ratio(const Strategy& pattern,
                                                    const AtomicParams& params) {
  const double at_n = effective_branching_ratio(pattern.resized(kAsymptoticPulses), params);
  const double before = effective_branching_ratio(pattern.resized(kAsymptoticPulses - 1), params);
  return {at_n, std::abs(at_n - before)};
}

std::map<Level, double> absorbing_distribution(const TransitionMap& map, Level start) {
  const auto& m = map.matrix();
  std::vector<Level> transient;
  std::vector<Level> absorbing;
  for (Level l : kAllLevels) {
    (m[index(l)][index(l)] == 1.0 ? absorbing : transient).push_back(l);
  }

  std::map<Level, double> result;
  for (Level a : absorbing) result[a] = 0.0;
  if (m[index(start)][index(start)] == 1.0) {
    result[start] = 1.0;
    return result;
  }

  const auto nt = static_cast<Eigen::Index>(transient.size());
  const auto na = static_cast<Eigen::Index>(absorbing.size());
  Eigen::MatrixXd q(nt, nt);
  Eigen::MatrixXd r(nt, na);
  for (Eigen::Index i = 0; i < nt; ++i) {
    for (Eigen::Index j = 0; j < nt; ++j) q(i, j) = m[index(transient[i])][index(transient[j])];
    for (Eigen::Index j = 0; j < na; ++j) r(i, j) = m[index(transient[i])][index(absorbing[j])];
  }

  const double radius = q.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0 - 1e-12)) {
    throw AnalysisError("transient block does not drain (spectral radius " +
                        std::to_string(radius) + ")");
  }

  // B = (I - Q)^{-1} R
  const Eigen::MatrixXd b =
      (Eigen::MatrixXd::Identity(nt, nt) - q).fullPivLu().solve(r);
  Eigen::Index row = 0;
  while (transient[row] != start) ++row;
  for (Eigen::Index j = 0; j < na; ++j) result[absorbing[j]] = b(row, j);
  return result;
}

}  // namespace ionmux
