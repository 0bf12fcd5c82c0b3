#include "ionmux/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ionmux/errors.hpp"
#include "ionmux/markov_engine.hpp"

namespace ionmux {

namespace {

void check_factor(double v, const char* key) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ConfigError(key, std::string(key) + " must lie in [0, 1] (got " + std::to_string(v) + ")");
  }
}

void check_time(double v, const char* key) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ConfigError(key, std::string(key) + " must be a finite time >= 0");
  }
}

}  // namespace

double EfficiencyChain::fiber_transmission(double length_m) const {
  return std::pow(10.0, -attenuation_db_per_km * (length_m / 1000.0) / 10.0);
}

double EfficiencyChain::product_without_other(double length_m) const {
  return collection * conversion * fiber_transmission(length_m) * detector;
}

double EfficiencyChain::product(double length_m) const {
  return product_without_other(length_m) * other;
}

void EfficiencyChain::validate() const {
  check_factor(collection, "efficiency.collection");
  check_factor(conversion, "efficiency.conversion");
  check_factor(detector, "efficiency.detector");
  check_factor(other, "efficiency.other");
  if (!(attenuation_db_per_km >= 0.0) || !std::isfinite(attenuation_db_per_km)) {
    throw ConfigError("efficiency.attenuation", "efficiency.attenuation must be >= 0 dB/km");
  }
}

void MemoryParams::validate() const {
  if (!(a > 0.0 && a <= 0.5)) throw ParameterError("memory amplitude a must lie in (0, 1/2]");
  if (!(tau_coh > 0.0)) throw ParameterError("memory tau_coh must be > 0");
  if (!(tau_life > 0.0)) throw ParameterError("memory tau_life must be > 0");
}

std::vector<int> ProtocolSpec::visit_order() const {
  if (!shuttle_plan.empty()) return shuttle_plan;
  std::vector<int> order(static_cast<std::size_t>(std::max(ions, 0)));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

void ProtocolSpec::validate() const {
  if (ions < 1) throw ConfigError("protocol.ions", "protocol.ions must be >= 1");
  per_ion_strategy.validate();
  atomic.validate();
  auto order = visit_order();
  std::sort(order.begin(), order.end());
  for (int i = 0; i < ions; ++i) {
    if (static_cast<int>(order.size()) != ions || order[static_cast<std::size_t>(i)] != i) {
      throw ConfigError("protocol.shuttle_plan",
                        "protocol.shuttle_plan must visit each ion 0.." + std::to_string(ions - 1) +
                            " exactly once");
    }
  }
  check_time(initial_pump_time, "timing.initial_pump");
  check_time(shelve_time, "timing.shelve");
  check_time(shuttle_time, "protocol.shuttle_time");
  check_time(comm_overhead, "link.comm_overhead");
  check_time(cooling.duration, "cooling.duration");
  check_time(timing.pulse_interval, "timing.pulse_interval");
  check_time(timing.pump_time, "timing.pump");
  if (cooling.every_k_rounds < 1) {
    throw ConfigError("cooling.every", "cooling.every must be >= 1 rounds");
  }
  if (!(length >= 0.0) || !std::isfinite(length)) {
    throw ConfigError("link.length", "link.length must be >= 0");
  }
  if (!(c_fiber > 0.0) || !std::isfinite(c_fiber)) {
    throw ConfigError("link.c_fiber", "link.c_fiber must be > 0");
  }
  if (t_ovh) check_time(*t_ovh, "link.t_ovh");
  if (target_success_rate && !(*target_success_rate > 0.0)) {
    throw ConfigError("calibration.target_rate", "calibration.target_rate must be > 0 /s");
  }
  if (survival) check_factor(*survival, "memory.survival");
  efficiencies.validate();
  memory.validate();
}

PulseProgram compile(const ProtocolSpec& spec) {
  spec.validate();
  PulseProgram program(spec.atomic);
  program.push(PrimitiveKind::InitialPump, spec.initial_pump_time, -1);

  const auto order = spec.visit_order();
  std::vector<int> shelved;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) {
      // Park the previous ion's metastable population before moving on.
      program.push(PrimitiveKind::ShelveTo, spec.shelve_time, order[i - 1]);
      shelved.push_back(order[i - 1]);
      program.push(PrimitiveKind::Shuttle, spec.shuttle_time, -1);
    }
    append_train(program, spec.per_ion_strategy, spec.timing, order[i]);
  }

  const double fixed_overhead = spec.initial_pump_time +
                                (spec.ions > 1 && spec.return_shuttle ? spec.shuttle_time : 0.0) +
                                spec.shelve_time * static_cast<double>(shelved.size()) +
                                spec.cooling.duration / spec.cooling.every_k_rounds;
  double comm = spec.comm_overhead;
  if (spec.t_ovh) {
    comm = *spec.t_ovh - fixed_overhead;
    if (comm < -1e-15) {
      throw ConfigError("link.t_ovh", "link.t_ovh must be >= the fixed overhead of " +
                                          std::to_string(fixed_overhead) + " s");
    }
    comm = std::max(comm, 0.0);
  }

  program.push(PrimitiveKind::RoundTrip, 2.0 * spec.length / spec.c_fiber, -1);
  if (spec.ions > 1 && spec.return_shuttle) {
    program.push(PrimitiveKind::Shuttle, spec.shuttle_time, -1);
  }
  for (int ion : shelved) program.push(PrimitiveKind::ShelveFrom, spec.shelve_time, ion);
  program.push(PrimitiveKind::Overhead, comm, -1);
  if (spec.cooling.duration > 0.0) {
    program.push(PrimitiveKind::Cooling, spec.cooling.duration / spec.cooling.every_k_rounds, -1);
  }
  return program;
}

RoundTiming round_timing(const PulseProgram& program) {
  RoundTiming t;
  const auto ex = program.excitations();
  t.modes = static_cast<int>(ex.size());
  if (!ex.empty()) t.active_span = ex.back()->end() - ex.front()->start;
  for (const auto& p : program.primitives()) {
    if (p.kind == PrimitiveKind::RoundTrip) t.round_trip += p.duration;
    if (p.kind == PrimitiveKind::Cooling) t.cooling += p.duration;
    if (p.kind == PrimitiveKind::Overhead) t.comm_overhead += p.duration;
  }
  t.t_round = program.end_time();
  t.t_ovh = t.t_round - t.round_trip - t.active_span;
  return t;
}

RateReport simulate_rates(const ProtocolSpec& spec) {
  const auto program = compile(spec);
  RateReport r;
  r.timing = round_timing(program);

  std::vector<double> raw;
  for (int ion : spec.visit_order()) {
    const auto run = run_program(PopulationVector::pure(Level::SUp), program, ion);
    r.modes.insert(r.modes.end(), run.profile.modes.begin(), run.profile.modes.end());
    raw.insert(raw.end(), run.profile.per_mode.begin(), run.profile.per_mode.end());
  }
  // Trains are visited in mode order, so r.modes is already ascending.
  const double raw_sum = std::accumulate(raw.begin(), raw.end(), 0.0);

  EfficiencyChain chain = spec.efficiencies;
  if (spec.target_success_rate) {
    const double base = raw_sum * chain.product_without_other(spec.length);
    if (!(base > 0.0)) {
      throw ConfigError("calibration.target_rate",
                        "calibration.target_rate needs a nonzero emission and efficiency chain");
    }
    chain.other = *spec.target_success_rate * r.timing.t_round / base;
    if (chain.other > 1.0) {
      throw ConfigError("calibration.target_rate",
                        "calibration.target_rate is unreachable: efficiency.other would be " +
                            std::to_string(chain.other) + " (> 1)");
    }
  }
  r.other_efficiency = chain.other;
  r.efficiency = chain.product(spec.length);

  double survive_all = 1.0;
  for (double p : raw) {
    const double q = p * r.efficiency;
    if (!(q >= 0.0 && q <= 1.0)) {
      throw ConfigError("efficiency", "chained mode probability outside [0, 1]");
    }
    r.per_mode_p.push_back(q);
    r.p_round += q;
    survive_all *= 1.0 - q;
  }
  r.p_round_exact = 1.0 - survive_all;
  if (r.p_round > 1.0) throw ConfigError("efficiency", "round success probability exceeds 1");
  r.p0 = spec.atomic.p_br_d * r.efficiency;

  r.success_rate = r.p_round / r.timing.t_round;
  r.success_rate_exact = r.p_round_exact / r.timing.t_round;
  r.attempt_rate = r.timing.modes / r.timing.t_round;

  LinkParams link;
  link.length = spec.length;
  link.c_fiber = spec.c_fiber;
  link.t_ovh = r.timing.t_ovh;
  link.modes = std::max(r.timing.modes, 1);
  link.dt = r.timing.modes > 0 ? r.timing.active_span / r.timing.modes : 0.0;
  r.M = enhancement(link);
  r.M_prime = r.p0 > 0.0 ? enhancement_inhomogeneous(link, r.per_mode_p, r.p0) : 0.0;

  if (spec.survival) {
    r.survival = *spec.survival;
  } else {
    r.survival = r.success_rate > 0.0 ? memory_survival(1.0 / r.success_rate, spec.memory) : 0.0;
  }
  r.eta_link = link_efficiency(r.success_rate, spec.memory, r.survival);
  return r;
}

double memory_fidelity(double t, const MemoryParams& mem) {
  mem.validate();
  if (!(t >= 0.0)) throw ParameterError("storage time must be >= 0");
  const double x = t / mem.tau_coh;
  return mem.a * std::exp(-x * x) + 0.5;
}

double memory_survival(double t, const MemoryParams& mem) {
  mem.validate();
  if (!(t >= 0.0)) throw ParameterError("storage time must be >= 0");
  return std::exp(-t / mem.tau_life);
}

double link_efficiency(double success_rate, const MemoryParams& mem, double survival) {
  mem.validate();
  if (!(success_rate >= 0.0) || !(survival >= 0.0)) {
    throw ParameterError("link efficiency inputs must be >= 0");
  }
  return success_rate * mem.tau_coh * survival;
}

}  // namespace ionmux
