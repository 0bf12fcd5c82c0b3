#include "ionmux/bsm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "ionmux/errors.hpp"
#include "ionmux/monte_carlo.hpp"

namespace ionmux {

namespace {

using Block = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

constexpr std::array<Level, 3> kTransient = {Level::SUp, Level::SDown, Level::P};
constexpr double kGeometrySlack = 1e-12;

// Transient block of a map plus, per source row, the mass it sends to the
// collected-photon channel and to every other metastable level.
struct Step {
  Block t{};
  Vec3 emit{};
  Vec3 leave{};
};

Step step_from(const TransitionMap& map) {
  Step s;
  const auto& m = map.matrix();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = index(kTransient[i]);
    for (std::size_t j = 0; j < 3; ++j) s.t[i][j] = m[row][index(kTransient[j])];
    if (map.kind() == MapKind::Excite) s.emit[i] = m[row][index(Level::DPhoton)];
    for (Level d : {Level::DPhoton, Level::DLeak, Level::DShelf}) s.leave[i] += m[row][index(d)];
    s.leave[i] -= s.emit[i];
  }
  return s;
}

Step compose(const Step& first, const Step& second) {
  Step s;
  for (std::size_t i = 0; i < 3; ++i) {
    s.emit[i] = first.emit[i];
    s.leave[i] = first.leave[i];
    for (std::size_t k = 0; k < 3; ++k) {
      s.emit[i] += first.t[i][k] * second.emit[k];
      s.leave[i] += first.t[i][k] * second.leave[k];
      for (std::size_t j = 0; j < 3; ++j) s.t[i][j] += first.t[i][k] * second.t[k][j];
    }
  }
  return s;
}

Step identity_step() {
  Step s;
  for (std::size_t i = 0; i < 3; ++i) s.t[i][i] = 1.0;
  return s;
}

// One window of one side: population steps since the previous window, then
// the excitation. Pre-window steps never emit into a window.
struct WindowSteps {
  int mode = 0;
  double start = 0.0;
  double window = 0.0;
  Step pre;
  Step excite;
};

struct SideTrain {
  std::vector<std::vector<WindowSteps>> by_pair;  // visit order
  double eta = 0.0;
  RoundTiming timing;
};

SideTrain side_train(const ProtocolSpec& spec) {
  const auto program = compile(spec);
  SideTrain side;
  side.timing = round_timing(program);
  side.eta = spec.efficiencies.product(spec.length);
  for (int ion : spec.visit_order()) {
    std::vector<WindowSteps> windows;
    Step pre = identity_step();
    for (const auto& p : program.primitives()) {
      if (!applies_to(p, ion) || p.kind == PrimitiveKind::InitialPump) continue;
      const Step s = step_from(*program.map_for(p));
      if (p.kind == PrimitiveKind::Excite) {
        windows.push_back({p.mode, p.start, p.window, pre, s});
        pre = identity_step();
      } else {
        pre = compose(pre, s);
      }
    }
    side.by_pair.push_back(std::move(windows));
  }
  return side;
}

void check_aligned(const SideTrain& a, const SideTrain& b) {
  if (a.by_pair.size() != b.by_pair.size()) {
    throw ProtocolError("node ion counts differ (" + std::to_string(a.by_pair.size()) + " vs " +
                        std::to_string(b.by_pair.size()) + ")");
  }
  const double origin_a = a.by_pair.front().empty() ? 0.0 : a.by_pair.front().front().start;
  const double origin_b = b.by_pair.front().empty() ? 0.0 : b.by_pair.front().front().start;
  for (std::size_t k = 0; k < a.by_pair.size(); ++k) {
    const auto& wa = a.by_pair[k];
    const auto& wb = b.by_pair[k];
    if (wa.size() != wb.size()) {
      throw ProtocolError("node mode counts differ for ion pair " + std::to_string(k));
    }
    for (std::size_t w = 0; w < wa.size(); ++w) {
      const double ta = wa[w].start - origin_a;
      const double tb = wb[w].start - origin_b;
      const bool same_window = wa[w].window == wb[w].window ||
                               std::abs(wa[w].window - wb[w].window) <=
                                   kGeometrySlack * std::max(1.0, std::abs(wa[w].window));
      if (std::abs(ta - tb) > kGeometrySlack * std::max(1.0, std::abs(ta)) + 1e-15 ||
          !same_window) {
        throw ProtocolError("detection windows of the two nodes are not aligned at mode " +
                            std::to_string(wa[w].mode));
      }
    }
  }
}

struct JointState {
  Block x{};
  double heralded = 0.0;
  double terminated = 0.0;
  double active() const {
    double s = 0.0;
    for (const auto& r : x) for (double v : r) s += v;
    return s;
  }
};

// Applies side steps to the joint state; returns the herald flow.
double joint_apply(JointState& s, const Step& a, const Step& b, double accept) {
  JointState out;
  out.heralded = s.heralded;
  out.terminated = s.terminated;
  double herald = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double m = s.x[i][j];
      if (m == 0.0) continue;
      double ca = 0.0;
      double cb = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        ca += a.t[i][k];
        cb += b.t[j][k];
        for (std::size_t l = 0; l < 3; ++l) out.x[k][l] += m * a.t[i][k] * b.t[j][l];
      }
      const double both = a.emit[i] * b.emit[j];
      herald += m * both * accept;
      // Everything else leaving the joint transient space ends the attempt.
      const double out_a = a.emit[i] + a.leave[i];
      const double out_b = b.emit[j] + b.leave[j];
      out.terminated +=
          m * (out_a * out_b - both * accept + out_a * cb + ca * out_b);
    }
  }
  out.heralded += herald;
  s = out;
  return herald;
}

double emission(const Vec3& v, const Step& s) {
  return v[0] * s.emit[0] + v[1] * s.emit[1] + v[2] * s.emit[2];
}

Vec3 propagate(const Vec3& v, const Step& s) {
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) out[j] += v[i] * s.t[i][j];
  }
  return out;
}

}  // namespace

void NodePair::validate() const {
  a.validate();
  b.validate();
  if (!(bsm_efficiency >= 0.0 && bsm_efficiency <= 1.0)) {
    throw ConfigError("bsm.efficiency", "bsm.efficiency must lie in [0, 1]");
  }
  if (!std::isfinite(window_alignment)) {
    throw ConfigError("bsm.window_alignment", "bsm.window_alignment must be finite");
  }
}

std::string_view to_string(AttemptOutcome outcome) {
  switch (outcome) {
    case AttemptOutcome::BothEmit: return "both_emit";
    case AttemptOutcome::NeitherEmit: return "neither_emit";
    case AttemptOutcome::OneEmits: return "one_emits";
  }
  return "?";
}

double window_coincidence(double p_a, double p_b, const NodePair& pair) {
  if (!(p_a >= 0.0 && p_a <= 1.0 && p_b >= 0.0 && p_b <= 1.0)) {
    throw ParameterError("window emission probabilities must lie in [0, 1]");
  }
  return p_a * p_b * pair.bsm_efficiency;
}

IonIonReport simulate_ion_ion(const NodePair& pair) {
  pair.validate();
  const SideTrain a = side_train(pair.a);
  const SideTrain b = side_train(pair.b);
  check_aligned(a, b);

  IonIonReport report;
  report.eta_a = a.eta;
  report.eta_b = b.eta;
  report.timing = a.timing.t_round >= b.timing.t_round ? a.timing : b.timing;
  const double accept = a.eta * b.eta * pair.bsm_efficiency;

  double heralded = 0.0;  // global, all earlier pairs included
  for (std::size_t k = 0; k < a.by_pair.size(); ++k) {
    const double reach = 1.0 - heralded;  // fresh ions for this pair
    JointState s;
    s.x[0][0] = 1.0;
    Vec3 va{1.0, 0.0, 0.0};
    Vec3 vb{1.0, 0.0, 0.0};
    for (std::size_t w = 0; w < a.by_pair[k].size(); ++w) {
      const auto& wa = a.by_pair[k][w];
      const auto& wb = b.by_pair[k][w];
      WindowRow row;
      row.mode = wa.mode;
      row.ion_pair = static_cast<int>(k);
      va = propagate(va, wa.pre);
      vb = propagate(vb, wb.pre);
      row.p_a = emission(va, wa.excite) * a.eta;
      row.p_b = emission(vb, wb.excite) * b.eta;
      va = propagate(va, wa.excite);
      vb = propagate(vb, wb.excite);

      const double in = s.active();
      const double dead_before = s.terminated;
      const double herald =
          joint_apply(s, compose(wa.pre, wa.excite), compose(wb.pre, wb.excite), accept);
      row.active_in = reach * in;
      row.herald = reach * herald;
      row.terminated = reach * (s.terminated - dead_before);
      row.continuing = reach * s.active();
      row.heralded_cum = heralded + reach * s.heralded;
      row.terminated_cum = reach * s.terminated;
      row.active_cum = row.continuing;
      const double local = std::abs(in - herald - (s.terminated - dead_before) - s.active());
      const double global =
          std::abs(1.0 - row.heralded_cum - row.terminated_cum - row.active_cum);
      report.max_balance_error = std::max({report.max_balance_error, local, global});
      report.windows.push_back(row);
    }
    heralded += reach * s.heralded;
  }
  report.p_herald = heralded;
  report.success_rate = report.p_herald / report.timing.t_round;
  return report;
}

double post_herald_coincidence(const NodePair& pair) {
  pair.validate();
  const SideTrain a = side_train(pair.a);
  const SideTrain b = side_train(pair.b);
  check_aligned(a, b);
  const double accept = a.eta * b.eta * pair.bsm_efficiency;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.by_pair.size(); ++k) {
    JointState s;
    s.heralded = 1.0;
    for (std::size_t w = 0; w < a.by_pair[k].size(); ++w) {
      const auto& wa = a.by_pair[k][w];
      const auto& wb = b.by_pair[k][w];
      const double h =
          joint_apply(s, compose(wa.pre, wa.excite), compose(wb.pre, wb.excite), accept);
      worst = std::max({worst, h, std::abs(1.0 - s.heralded)});
    }
  }
  return worst;
}

IonIonMonteCarlo monte_carlo_ion_ion(const NodePair& pair, std::uint64_t samples,
                                     std::uint64_t seed, unsigned threads) {
  pair.validate();
  if (samples < 1) throw ParameterError("monte carlo needs at least one sample");
  const SideTrain ta = side_train(pair.a);
  const SideTrain tb = side_train(pair.b);
  check_aligned(ta, tb);
  const auto prog_a = compile(pair.a);
  const auto prog_b = compile(pair.b);
  const auto order_a = pair.a.visit_order();
  const auto order_b = pair.b.visit_order();
  const double accept = ta.eta * tb.eta * pair.bsm_efficiency;

  // Slot of each node-a mode index in the global window list.
  std::vector<int> modes;
  for (const auto& windows : ta.by_pair) {
    for (const auto& w : windows) modes.push_back(w.mode);
  }
  // Windows are matched by position in the train, not by raw mode index.
  std::unordered_map<int, int> b_to_a;
  for (std::size_t k = 0; k < tb.by_pair.size(); ++k) {
    for (std::size_t w = 0; w < tb.by_pair[k].size(); ++w) {
      b_to_a[tb.by_pair[k][w].mode] = ta.by_pair[k][w].mode;
    }
  }
  auto slot_of = [&](int mode) {
    return static_cast<std::size_t>(std::lower_bound(modes.begin(), modes.end(), mode) - modes.begin());
  };

  std::vector<std::vector<std::uint64_t>> counts(kMonteCarloShards);
  for_each_shard(samples, seed, threads, [&](unsigned shard, std::uint64_t n, std::mt19937_64& rng) {
    auto& c = counts[shard];
    c.assign(modes.size(), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < order_a.size(); ++k) {
        const int ma = sample_emission(prog_a, order_a[k], rng);
        const int mb = sample_emission(prog_b, order_b[k], rng);
        if (ma < 0 || mb < 0 || b_to_a.at(mb) != ma) continue;
        if (uniform01(rng) < accept) {
          ++c[slot_of(ma)];
          break;
        }
      }
    }
  });

  IonIonMonteCarlo mc;
  mc.samples = samples;
  const double n = static_cast<double>(samples);
  auto se = [n](double p) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / n); };
  std::uint64_t total = 0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    std::uint64_t k = 0;
    for (const auto& c : counts) k += c[m];
    total += k;
    const double p = static_cast<double>(k) / n;
    mc.per_mode_herald.push_back(p);
    mc.per_mode_se.push_back(se(p));
  }
  mc.p_herald = static_cast<double>(total) / n;
  mc.se = se(mc.p_herald);
  return mc;
}

std::string_view to_string(SweepAxis axis) {
  return axis == SweepAxis::ModeCount ? "mode_count" : "ion_count";
}

SweepAxis sweep_axis_from_string(std::string_view name) {
  if (name == "mode_count") return SweepAxis::ModeCount;
  if (name == "ion_count") return SweepAxis::IonCount;
  throw ConfigError("sweep.axis", "sweep.axis must be mode_count or ion_count");
}

ProtocolSpec resized_spec(const ProtocolSpec& spec, int pulses, int ions) {
  ProtocolSpec s = spec;
  s.per_ion_strategy = spec.per_ion_strategy.resized(pulses);
  if (ions != spec.ions) s.shuttle_plan.clear();
  s.ions = ions;
  return s;
}

NodePair single_mode_baseline(const NodePair& base) {
  NodePair p = base;
  for (ProtocolSpec* s : {&p.a, &p.b}) {
    s->ions = 1;
    s->shuttle_plan.clear();
    s->per_ion_strategy = Strategy::named("none", 1, kInfiniteWindow);
  }
  return p;
}

IonIonCurve sweep_enhancement(const NodePair& base, SweepAxis axis, const std::vector<int>& grid) {
  if (grid.empty()) throw ParameterError("sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ParameterError("sweep grid values must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1]) throw ParameterError("sweep grid must be increasing");
  }
  IonIonCurve curve;
  const auto baseline = simulate_ion_ion(single_mode_baseline(base));
  curve.baseline_p_herald = baseline.p_herald;
  curve.baseline_rate = baseline.success_rate;

  for (int g : grid) {
    IonIonPoint pt;
    pt.grid_value = g;
    pt.ions = axis == SweepAxis::IonCount ? g : base.a.ions;
    pt.pulses_per_ion = axis == SweepAxis::ModeCount ? g : base.a.per_ion_strategy.pulse_count;
    NodePair pair = base;
    pair.a = resized_spec(base.a, pt.pulses_per_ion, pt.ions);
    pair.b = resized_spec(base.b, pt.pulses_per_ion, pt.ions);
    const auto r = simulate_ion_ion(pair);
    pt.n = r.timing.modes;
    pt.p_herald = r.p_herald;
    pt.t_round = r.timing.t_round;
    pt.rate = r.success_rate;

    LinkParams link;
    link.length = pair.a.length;
    link.c_fiber = pair.a.c_fiber;
    link.t_ovh = r.timing.t_ovh;
    link.modes = std::max(pt.n, 1);
    link.dt = pt.n > 0 ? r.timing.active_span / pt.n : 0.0;
    pt.M = enhancement(link);
    pt.M_prime = curve.baseline_rate > 0.0 ? pt.rate / curve.baseline_rate : 0.0;
    pt.efficiency_ratio = curve.baseline_p_herald > 0.0 ? pt.p_herald / curve.baseline_p_herald : 0.0;
    if (pt.M_prime > curve.peak_M_prime) {
      curve.peak_M_prime = pt.M_prime;
      curve.peak_n = pt.n;
    }
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace ionmux
