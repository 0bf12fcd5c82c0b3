#include "ionmux/link_timing.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "ionmux/errors.hpp"

namespace ionmux {

void LinkParams::validate() const {
  if (!(length >= 0.0) || !std::isfinite(length)) throw ParameterError("fiber length must be >= 0");
  if (!(c_fiber > 0.0) || !std::isfinite(c_fiber)) throw ParameterError("c_fiber must be > 0");
  if (!(t_ovh >= 0.0) || !std::isfinite(t_ovh)) throw ParameterError("t_ovh must be >= 0");
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be >= 0");
  if (modes < 1) throw ParameterError("mode count N must be >= 1");
}

double t_eff(const LinkParams& link) {
  link.validate();
  const double n = link.modes;
  return (link.waiting_time() + n * link.dt) / n;
}

double enhancement(const LinkParams& link) {
  link.validate();
  if (link.modes == 1) return 1.0;
  // T_0 / T_eff rearranged to N * T_0 / (N T_eff).
  const double n = link.modes;
  const double round = link.waiting_time() + n * link.dt;
  if (round == 0.0) throw ParameterError("round time is zero (2L/c + T_ovh + N dt = 0)");
  return n * link.single_mode_time() / round;
}

double enhancement_inhomogeneous(const LinkParams& link, std::span<const double> p, double p0) {
  if (p.empty()) throw ParameterError("per-mode probability list is empty");
  if (!(p0 > 0.0)) throw ParameterError("single-mode probability p0 must be > 0");
  LinkParams l = link;
  l.modes = static_cast<int>(p.size());
  const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
  return enhancement(l) * mean / p0;
}

double n_half_duty(const LinkParams& link) {
  link.validate();
  if (link.dt == 0.0) return std::numeric_limits<double>::infinity();
  return link.waiting_time() / link.dt;
}

double duty_cycle(const LinkParams& link) {
  link.validate();
  const double active = link.modes * link.dt;
  const double round = link.waiting_time() + active;
  return round == 0.0 ? 0.0 : active / round;
}

EnhancementCurve enhancement_curve(const LinkParams& link, int n_max) {
  if (n_max < 1) throw ParameterError("n_max must be >= 1");
  EnhancementCurve curve;
  LinkParams l = link;
  for (int n = 1; n <= n_max; ++n) {
    l.modes = n;
    curve.points.push_back({n, t_eff(l), enhancement(l), duty_cycle(l)});
  }
  curve.n_half = n_half_duty(link);
  curve.m_saturated = (curve.n_half + 1.0) / 2.0;
  return curve;
}

}  // namespace ionmux
