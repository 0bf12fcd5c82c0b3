#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ionmux/atomic_model.hpp"
#include "ionmux/link_timing.hpp"
#include "ionmux/pulse_program.hpp"

namespace ionmux {

/// Multiplicative photon-path efficiencies. Fiber transmission is derived from
/// the link length and attenuation.
struct EfficiencyChain {
  double collection = 1.0;
  double conversion = 1.0;
  double attenuation_db_per_km = 3.0;
  double detector = 1.0;
  double other = 1.0;

  double fiber_transmission(double length_m) const;
  double product(double length_m) const;
  /// Product without the `other` factor.
  double product_without_other(double length_m) const;
  void validate() const;
};

struct MemoryParams {
  double a = 0.5;
  double tau_coh = 0.366;
  double tau_life = 0.958;

  void validate() const;
};

struct CoolingSchedule {
  double duration = 0.0;
  int every_k_rounds = 1;
};

struct ProtocolSpec {
  std::string name = "custom";
  int ions = 1;
  Strategy per_ion_strategy = Strategy::named("none");
  TrainTiming timing;
  AtomicParams atomic;

  double initial_pump_time = 1e-6;
  double shelve_time = 0.0;
  double shuttle_time = 0.0;
  std::vector<int> shuttle_plan;  // empty: ions in order 0..ions-1
  bool return_shuttle = true;
  CoolingSchedule cooling;

  double length = 0.0;
  double c_fiber = 2.0e8;
  double comm_overhead = 0.0;
  /// When set, the total per-round overhead; comm_overhead is derived from it.
  std::optional<double> t_ovh;

  EfficiencyChain efficiencies;
  MemoryParams memory;
  /// Solve efficiencies.other so the first-success rate equals this (1/s).
  std::optional<double> target_success_rate;
  /// Measured memory survival; otherwise exp(-1/rate / tau_life).
  std::optional<double> survival;

  std::vector<int> visit_order() const;
  void validate() const;
};

/// Timestamped round: initial pump, per-ion trains separated by shelving and
/// shuttles, heralding round trip, return shuttle, unshelving, communication
/// overhead and the amortized cooling block. Throws ProtocolError on overlap.
PulseProgram compile(const ProtocolSpec& spec);

struct RoundTiming {
  double round_trip = 0.0;
  double active_span = 0.0;  // first excitation to end of the last window
  double cooling = 0.0;      // amortized per round
  double comm_overhead = 0.0;
  double t_ovh = 0.0;        // everything except round trip and active span
  double t_round = 0.0;
  int modes = 0;
};

RoundTiming round_timing(const PulseProgram& program);

struct RateReport {
  std::vector<int> modes;
  std::vector<double> per_mode_p;  // after the efficiency chain
  double p0 = 0.0;                 // untruncated single-mode reference
  double p_round = 0.0;            // first-success sum
  double p_round_exact = 0.0;      // 1 - prod(1 - p_i)
  RoundTiming timing;
  double attempt_rate = 0.0;       // modes per second
  double success_rate = 0.0;
  double success_rate_exact = 0.0;
  double M = 1.0;
  double M_prime = 1.0;
  double survival = 1.0;
  double eta_link = 0.0;
  double efficiency = 1.0;         // resolved chain product
  double other_efficiency = 1.0;   // resolved (possibly calibrated) other factor
};

/// Throws ConfigError when chained probabilities leave [0,1] or the
/// calibration needs an efficiency factor above 1.
RateReport simulate_rates(const ProtocolSpec& spec);

/// a exp(-(t/tau_coh)^2) + 1/2
double memory_fidelity(double t, const MemoryParams& mem);
/// exp(-t/tau_life)
double memory_survival(double t, const MemoryParams& mem);
/// success_rate * tau_coh * survival
double link_efficiency(double success_rate, const MemoryParams& mem, double survival);

}  // namespace ionmux
