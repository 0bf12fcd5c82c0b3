#include "ionmux/atomic_model.hpp"

#include <cmath>

#include "ionmux/errors.hpp"

namespace ionmux {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::ProtocolConstruction: return "protocol_construction";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Analysis: return "analysis";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

LevelMatrix identity_matrix() {
  LevelMatrix m{};
  for (std::size_t i = 0; i < kLevelCount; ++i) m[i][i] = 1.0;
  return m;
}

void set_row(LevelMatrix& m, Level from, std::initializer_list<std::pair<Level, double>> entries) {
  auto& row = m[index(from)];
  row.fill(0.0);
  for (const auto& [to, p] : entries) row[index(to)] += p;
}

}  // namespace

void AtomicParams::validate() const {
  if (!is_probability(p_br_d)) throw ParameterError("p_br_d must lie in [0,1]");
  if (!is_probability(w_up)) throw ParameterError("w_up must lie in [0,1]");
  if (!(std::isfinite(tau_p) && tau_p > 0.0)) throw ParameterError("tau_p must be positive");
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::SUp: return "S_up";
    case Level::SDown: return "S_down";
    case Level::P: return "P";
    case Level::DPhoton: return "D_photon";
    case Level::DLeak: return "D_leak";
    case Level::DShelf: return "D_shelf";
  }
  return "?";
}

std::string_view to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Excite: return "excite";
    case MapKind::Pump: return "pump";
    case MapKind::PumpCycle: return "pump_cycle";
    case MapKind::ShelveTo: return "shelve_to";
    case MapKind::ShelveFrom: return "shelve_from";
    case MapKind::Wait: return "wait";
    case MapKind::Reset: return "reset";
  }
  return "?";
}

PopulationVector PopulationVector::pure(Level level, int mode) {
  PopulationVector v;
  switch (level) {
    case Level::SUp: v.s_up = 1.0; break;
    case Level::SDown: v.s_down = 1.0; break;
    case Level::P: v.excited = 1.0; break;
    case Level::DPhoton: v.photon[mode] = 1.0; break;
    case Level::DLeak: v.d_leak = 1.0; break;
    case Level::DShelf: v.shelf = ShelfRecord{{}, 1.0}; break;
  }
  return v;
}

double PopulationVector::operator[](Level level) const {
  switch (level) {
    case Level::SUp: return s_up;
    case Level::SDown: return s_down;
    case Level::P: return excited;
    case Level::DPhoton: {
      double sum = 0.0;
      for (const auto& [mode, p] : photon) sum += p;
      return sum;
    }
    case Level::DLeak: return d_leak;
    case Level::DShelf: {
      if (!shelf) return 0.0;
      double sum = shelf->leak;
      for (const auto& [mode, p] : shelf->photon) sum += p;
      return sum;
    }
  }
  return 0.0;
}

double PopulationVector::total() const {
  double sum = 0.0;
  for (Level l : kAllLevels) sum += (*this)[l];
  return sum;
}

double PopulationVector::photon_in_mode(int mode) const {
  double p = 0.0;
  if (auto it = photon.find(mode); it != photon.end()) p += it->second;
  if (shelf) {
    if (auto it = shelf->photon.find(mode); it != shelf->photon.end()) p += it->second;
  }
  return p;
}

bool PopulationVector::has_tally(int mode) const {
  return photon.count(mode) != 0 || (shelf && shelf->photon.count(mode) != 0);
}

TransitionMap::TransitionMap(MapKind kind, const LevelMatrix& matrix, int mode)
    : kind_(kind), matrix_(matrix), mode_(mode) {}

PopulationVector TransitionMap::apply(const PopulationVector& in) const {
  PopulationVector out;

  // Optical rows: S_up, S_down, P.
  double new_photon = 0.0;
  for (Level src : {Level::SUp, Level::SDown, Level::P}) {
    const double mass = in[src];
    if (mass == 0.0) continue;
    const auto& row = matrix_[index(src)];
    out.s_up += mass * row[index(Level::SUp)];
    out.s_down += mass * row[index(Level::SDown)];
    out.excited += mass * row[index(Level::P)];
    out.d_leak += mass * row[index(Level::DLeak)];
    new_photon += mass * row[index(Level::DPhoton)];
  }

  // Metastable rows.
  switch (kind_) {
    case MapKind::Reset:
      out.s_up += in[Level::DPhoton] + in.d_leak + in[Level::DShelf];
      break;
    case MapKind::ShelveTo: {
      PopulationVector::ShelfRecord record = in.shelf.value_or(PopulationVector::ShelfRecord{});
      for (const auto& [mode, p] : in.photon) record.photon[mode] += p;
      record.leak += in.d_leak;
      if (!in.photon.empty() || in.d_leak != 0.0 || in.shelf) out.shelf = std::move(record);
      break;
    }
    case MapKind::ShelveFrom: {
      if (!in.shelf) throw ProtocolError("unshelve without a matching shelve");
      out.photon = in.photon;
      for (const auto& [mode, p] : in.shelf->photon) out.photon[mode] += p;
      out.d_leak += in.d_leak + in.shelf->leak;
      break;
    }
    default:
      out.photon = in.photon;
      out.d_leak += in.d_leak;
      out.shelf = in.shelf;
      break;
  }

  if (new_photon != 0.0) {
    if (mode_ < 0) throw ProtocolError("map emits into D_photon without a mode index");
    if (in.has_tally(mode_)) {
      throw ProtocolError("mode index " + std::to_string(mode_) + " already has a photon tally");
    }
    out.photon[mode_] += new_photon;
  }
  return out;
}

double decayed_fraction(const AtomicParams& params, double window) {
  if (std::isinf(window) && window > 0) return 1.0;
  return -std::expm1(-window / params.tau_p);
}

double pump_return_fraction(const AtomicParams& params) {
  const double to_up = params.p_br_s() * params.w_down();
  const double denom = to_up + params.p_br_d;
  if (denom == 0.0) return 0.0;
  return to_up / denom;
}

TransitionMap excitation_map(const AtomicParams& params, double window, int mode_index) {
  params.validate();
  if (std::isnan(window) || window <= 0.0) {
    throw ParameterError("excitation window must be positive or infinite");
  }
  const double f = decayed_fraction(params, window);
  LevelMatrix m = identity_matrix();
  set_row(m, Level::SUp,
          {{Level::SUp, f * params.p_br_s() * params.w_up},
           {Level::SDown, f * params.p_br_s() * params.w_down()},
           {Level::DPhoton, f * params.p_br_d},
           {Level::P, 1.0 - f}});
  // Population still excited when this pulse arrives is flipped back down.
  set_row(m, Level::P, {{Level::SUp, 1.0}});
  return TransitionMap(MapKind::Excite, m, mode_index);
}

TransitionMap pump_map(const AtomicParams& params) {
  params.validate();
  const double a = pump_return_fraction(params);
  const double to_down = params.p_br_s() * params.w_down();
  LevelMatrix m = identity_matrix();
  if (to_down + params.p_br_d > 0.0) {
    set_row(m, Level::SDown, {{Level::SUp, a}, {Level::DLeak, 1.0 - a}});
  }
  // Leftover excited population decays first (uncollected), then is pumped.
  const auto& down_row = m[index(Level::SDown)];
  set_row(m, Level::P,
          {{Level::SUp, params.p_br_s() * params.w_up + to_down * down_row[index(Level::SUp)]},
           {Level::SDown, to_down * down_row[index(Level::SDown)]},
           {Level::DLeak, params.p_br_d + to_down * down_row[index(Level::DLeak)]}});
  return TransitionMap(MapKind::Pump, m);
}

TransitionMap pump_cycle_map(const AtomicParams& params) {
  params.validate();
  LevelMatrix m = identity_matrix();
  set_row(m, Level::SDown,
          {{Level::SUp, params.p_br_s() * params.w_down()},
           {Level::SDown, params.p_br_s() * params.w_up},
           {Level::DLeak, params.p_br_d}});
  set_row(m, Level::P,
          {{Level::SUp, params.p_br_s() * params.w_up},
           {Level::SDown, params.p_br_s() * params.w_down()},
           {Level::DLeak, params.p_br_d}});
  return TransitionMap(MapKind::PumpCycle, m);
}

TransitionMap shelve_map(ShelveDirection direction) {
  LevelMatrix m = identity_matrix();
  if (direction == ShelveDirection::ToShelf) {
    set_row(m, Level::DPhoton, {{Level::DShelf, 1.0}});
    set_row(m, Level::DLeak, {{Level::DShelf, 1.0}});
    return TransitionMap(MapKind::ShelveTo, m);
  }
  // Nominal row; apply() restores the recorded photon/leak split exactly.
  set_row(m, Level::DShelf, {{Level::DPhoton, 1.0}});
  return TransitionMap(MapKind::ShelveFrom, m);
}

TransitionMap wait_map(const AtomicParams& params, double duration) {
  params.validate();
  if (std::isnan(duration) || duration < 0.0) throw ParameterError("wait duration must be >= 0");
  const double g = decayed_fraction(params, duration);
  LevelMatrix m = identity_matrix();
  set_row(m, Level::P,
          {{Level::SUp, g * params.p_br_s() * params.w_up},
           {Level::SDown, g * params.p_br_s() * params.w_down()},
           {Level::DLeak, g * params.p_br_d},
           {Level::P, 1.0 - g}});
  return TransitionMap(MapKind::Wait, m);
}

TransitionMap reset_map() {
  LevelMatrix m{};
  for (Level l : kAllLevels) m[index(l)][index(Level::SUp)] = 1.0;
  return TransitionMap(MapKind::Reset, m);
}

}  // namespace ionmux
