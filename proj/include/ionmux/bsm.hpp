#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ionmux/protocol.hpp"

namespace ionmux {

/// Two nodes sending photons to a middle station. Both specs must compile to
/// the same mode count and window geometry; ion k of one node is paired with
/// ion k (in visit order) of the other.
struct NodePair {
  ProtocolSpec a;
  ProtocolSpec b;
  double bsm_efficiency = 0.5;
  double window_alignment = 0.0;  // node b timeline offset, informational

  void validate() const;
};

enum class AttemptOutcome { BothEmit, NeitherEmit, OneEmits };
std::string_view to_string(AttemptOutcome outcome);

/// p_a * p_b * bsm_efficiency
double window_coincidence(double p_a, double p_b, const NodePair& pair);

/// One detection window of the joint evolution. `herald`, `terminated` and
/// `continuing` split the mass that was active when the window opened; the
/// cumulative columns partition the whole round's probability.
struct WindowRow {
  int mode = 0;
  int ion_pair = 0;
  double p_a = 0.0;  // per-side emission in this window, after efficiencies
  double p_b = 0.0;
  double active_in = 0.0;
  double herald = 0.0;
  double terminated = 0.0;
  double continuing = 0.0;
  double heralded_cum = 0.0;
  double terminated_cum = 0.0;  // dead for the current ion pair
  double active_cum = 0.0;
};

struct IonIonReport {
  std::vector<WindowRow> windows;
  double p_herald = 0.0;  // per round
  double eta_a = 0.0;
  double eta_b = 0.0;
  RoundTiming timing;
  double success_rate = 0.0;
  double max_balance_error = 0.0;
  /// Efficiency imbalance changes only the rate, never the heralded state.
  bool quality_preserved = true;
};

/// Joint Markov evolution of both nodes with absorbing heralded and
/// terminated channels. Throws ProtocolError on mismatched mode trains.
IonIonReport simulate_ion_ion(const NodePair& pair);

/// Largest coincidence probability produced from already-heralded mass over
/// all windows of the round (zero for a correct herald channel).
double post_herald_coincidence(const NodePair& pair);

struct IonIonMonteCarlo {
  std::vector<double> per_mode_herald;
  std::vector<double> per_mode_se;
  double p_herald = 0.0;
  double se = 0.0;
  std::uint64_t samples = 0;
};

/// Samples both nodes' photon paths independently per ion pair and counts
/// coincidences accepted by the efficiency chains and the BSM.
IonIonMonteCarlo monte_carlo_ion_ion(const NodePair& pair, std::uint64_t samples,
                                     std::uint64_t seed, unsigned threads = 0);

enum class SweepAxis { ModeCount, IonCount };
std::string_view to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(std::string_view name);

struct IonIonPoint {
  int grid_value = 0;
  int n = 0;  // total modes
  int ions = 1;
  int pulses_per_ion = 1;
  double p_herald = 0.0;
  double t_round = 0.0;
  double rate = 0.0;
  double M = 1.0;                 // timing-only enhancement
  double M_prime = 1.0;           // rate / baseline rate
  double efficiency_ratio = 1.0;  // p_herald / baseline p_herald
};

struct IonIonCurve {
  std::vector<IonIonPoint> points;
  double baseline_p_herald = 0.0;
  double baseline_rate = 0.0;
  double peak_M_prime = 0.0;
  int peak_n = 0;
};

/// ModeCount: grid values are pulses per ion (total modes for a single ion);
/// IonCount: grid values are ion counts at fixed pulses per ion. The baseline
/// is the same pair with one ion, one pulse and an untruncated window.
IonIonCurve sweep_enhancement(const NodePair& base, SweepAxis axis, const std::vector<int>& grid);

/// Pair with one pulse, one ion and an untruncated window.
NodePair single_mode_baseline(const NodePair& base);

/// `spec` with the per-ion strategy regenerated for `pulses` and `ions` ions.
ProtocolSpec resized_spec(const ProtocolSpec& spec, int pulses, int ions);

}  // namespace ionmux
