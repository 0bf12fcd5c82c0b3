#pragma once

#include <span>
#include <vector>

namespace ionmux {

/// Timing of one multiplexed round: N modes spaced dt, plus the heralding
/// round trip 2L/c and the per-round overhead t_ovh. Seconds and meters.
struct LinkParams {
  double length = 0.0;
  double c_fiber = 2.0e8;
  double t_ovh = 0.0;
  double dt = 0.0;
  int modes = 1;

  double round_trip() const { return 2.0 * length / c_fiber; }
  /// 2L/c + T_ovh: everything in a round that is not emission.
  double waiting_time() const { return round_trip() + t_ovh; }
  /// Round time of the single-mode reference.
  double single_mode_time() const { return waiting_time() + dt; }
  void validate() const;
};

/// Averaged time per attempt, (2L/c + T_ovh + N dt) / N.
double t_eff(const LinkParams& link);

/// M = T_0 / T_eff.
double enhancement(const LinkParams& link);

/// M' = M * mean(p) / p0 with N taken as p.size().
double enhancement_inhomogeneous(const LinkParams& link, std::span<const double> p, double p0);

/// N_0 = (2L/c + T_ovh) / dt; +infinity when dt = 0.
double n_half_duty(const LinkParams& link);

/// Fraction of the round spent emitting, N dt / (2L/c + T_ovh + N dt).
double duty_cycle(const LinkParams& link);

struct EnhancementPoint {
  int n = 1;
  double t_eff = 0.0;
  double m = 1.0;
  double duty_cycle = 0.0;
};

struct EnhancementCurve {
  std::vector<EnhancementPoint> points;
  double n_half = 0.0;
  double m_saturated = 0.0;  // (N_0 + 1) / 2
};

/// M(N) for N = 1..n_max with the other link parameters fixed.
EnhancementCurve enhancement_curve(const LinkParams& link, int n_max);

}  // namespace ionmux
