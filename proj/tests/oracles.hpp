#pragma once

// Reference computations written directly from the decay physics, without
// going through TransitionMap matrices.

#include <cmath>
#include <random>
#include <vector>

#include "ionmux/atomic_model.hpp"

namespace oracle {

/// Return fraction of the pump summed as a geometric series of scattering
/// cycles: each cycle returns p_S*w_down, stays dark with p_S*w_up.
inline double pump_return_series(const ionmux::AtomicParams& p) {
  const double stay = p.p_br_s() * p.w_up;
  double sum = 0.0;
  double term = p.p_br_s() * p.w_down();
  for (int k = 0; k < 100000 && term > 1e-18; ++k) {
    sum += term;
    term *= stay;
  }
  return sum;
}

/// Per-mode emission of a pulse train, tracking (S_up, S_down, P) masses.
inline std::vector<double> train_emission(const ionmux::AtomicParams& p, int pulses,
                                          const std::vector<int>& pump_after, double window) {
  const double f = std::isinf(window) ? 1.0 : 1.0 - std::exp(-window / p.tau_p);
  const double a = pump_return_series(p);
  double u = 1.0, d = 0.0, e = 0.0;
  std::vector<double> out;
  for (int k = 1; k <= pulses; ++k) {
    const double excited = u;
    u = e;  // still-excited population is flipped back
    out.push_back(excited * f * p.p_br_d);
    u += excited * f * p.p_br_s() * p.w_up;
    d += excited * f * p.p_br_s() * p.w_down();
    e = excited * (1.0 - f);
    bool pump = false;
    for (int i : pump_after) pump = pump || i == k;
    if (pump) {
      u += e * p.p_br_s() * p.w_up;
      d += e * p.p_br_s() * p.w_down();
      e = 0.0;
      u += d * a;
      d = 0.0;
    }
  }
  return out;
}

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline ionmux::AtomicParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pd(0.01, 0.5), wu(0.05, 0.95), tau(2e-9, 30e-9);
  ionmux::AtomicParams p;
  p.p_br_d = pd(rng);
  p.w_up = wu(rng);
  p.tau_p = tau(rng);
  return p;
}

}  // namespace oracle
