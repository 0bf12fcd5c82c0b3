#include "ionmux/monte_carlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "ionmux/errors.hpp"

namespace ionmux {

namespace {

struct IonState {
  Level level = Level::SUp;
  int mode = -1;
  bool shelved = false;
};

double decay_time(const AtomicParams& params, std::mt19937_64& rng) {
  return -params.tau_p * std::log1p(-uniform01(rng));
}

// Branch of a spontaneous decay from P. `collected` selects D_photon vs D_leak.
void decay_from_p(IonState& s, const AtomicParams& params, std::mt19937_64& rng, bool collected,
                  int mode) {
  const double u = uniform01(rng);
  if (u < params.p_br_d) {
    s.level = collected ? Level::DPhoton : Level::DLeak;
    s.mode = collected ? mode : -1;
  } else if (u < params.p_br_d + params.p_br_s() * params.w_up) {
    s.level = Level::SUp;
  } else {
    s.level = Level::SDown;
  }
}

void pump_down(IonState& s, const AtomicParams& params, std::mt19937_64& rng) {
  const double to_up = params.p_br_s() * params.w_down();
  if (params.p_br_d + to_up == 0.0) return;  // never leaves S_down
  while (s.level == Level::SDown) {
    const double u = uniform01(rng);
    if (u < params.p_br_d) {
      s.level = Level::DLeak;
    } else if (u < params.p_br_d + to_up) {
      s.level = Level::SUp;
    }
  }
}

void step(IonState& s, const Primitive& p, const AtomicParams& params, std::mt19937_64& rng) {
  switch (p.kind) {
    case PrimitiveKind::InitialPump:
      s = IonState{};
      break;
    case PrimitiveKind::Excite:
      if (s.level == Level::SUp) {
        if (decay_time(params, rng) < p.window) {
          decay_from_p(s, params, rng, true, p.mode);
        } else {
          s.level = Level::P;
        }
      } else if (s.level == Level::P) {
        s.level = Level::SUp;
      }
      break;
    case PrimitiveKind::Pump:
      if (s.level == Level::P) decay_from_p(s, params, rng, false, -1);
      if (s.level == Level::SDown) pump_down(s, params, rng);
      break;
    case PrimitiveKind::Wait:
      if (s.level == Level::P && decay_time(params, rng) < p.duration) {
        decay_from_p(s, params, rng, false, -1);
      }
      break;
    case PrimitiveKind::ShelveTo:
      if (s.level == Level::DPhoton || s.level == Level::DLeak) s.shelved = true;
      break;
    case PrimitiveKind::ShelveFrom:
      s.shelved = false;
      break;
    default:
      break;
  }
}

struct InitialSampler {
  struct Entry {
    double cumulative;
    IonState state;
  };
  std::vector<Entry> entries;

  explicit InitialSampler(const PopulationVector& v) {
    double acc = 0.0;
    auto add = [&](double p, IonState s) {
      if (p <= 0.0) return;
      acc += p;
      entries.push_back({acc, s});
    };
    add(v.s_up, {Level::SUp, -1, false});
    add(v.s_down, {Level::SDown, -1, false});
    add(v.excited, {Level::P, -1, false});
    add(v.d_leak, {Level::DLeak, -1, false});
    for (const auto& [mode, p] : v.photon) add(p, {Level::DPhoton, mode, false});
    if (v.shelf) {
      add(v.shelf->leak, {Level::DLeak, -1, true});
      for (const auto& [mode, p] : v.shelf->photon) add(p, {Level::DPhoton, mode, true});
    }
    if (entries.empty()) throw ParameterError("initial population is empty");
  }

  IonState draw(std::mt19937_64& rng) const {
    if (entries.size() == 1) return entries.front().state;
    const double u = uniform01(rng) * entries.back().cumulative;
    for (const auto& e : entries) {
      if (u < e.cumulative) return e.state;
    }
    return entries.back().state;
  }
};

struct ShardCounts {
  std::vector<std::uint64_t> per_mode;
  std::array<std::uint64_t, kLevelCount> residual{};
};

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void for_each_shard(std::uint64_t samples, std::uint64_t seed, unsigned threads,
                    const std::function<void(unsigned, std::uint64_t, std::mt19937_64&)>& body) {
  constexpr unsigned kShards = kMonteCarloShards;
  auto run_shard = [&](unsigned shard) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(shard)));
    body(shard, samples / kShards + (shard < samples % kShards ? 1 : 0), rng);
  };
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min(workers, kShards);
  if (workers <= 1) {
    for (unsigned shard = 0; shard < kShards; ++shard) run_shard(shard);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (unsigned shard = w; shard < kShards; shard += workers) run_shard(shard);
    });
  }
  for (auto& t : pool) t.join();
}

int sample_emission(const PulseProgram& program, int ion, std::mt19937_64& rng) {
  IonState s;
  for (const auto& p : program.primitives()) {
    if (!applies_to(p, ion)) continue;
    step(s, p, program.params(), rng);
  }
  return s.level == Level::DPhoton ? s.mode : -1;
}

MonteCarloEstimate monte_carlo_oracle(const PopulationVector& initial, const PulseProgram& program,
                                      std::uint64_t samples, std::uint64_t seed,
                                      std::optional<int> ion, unsigned threads) {
  if (samples < 1) throw ParameterError("monte carlo needs at least one sample");
  if (!ion && program.ions().size() > 1) {
    throw ProtocolError("multi-ion program: select the ion to sample");
  }
  const auto modes = program.modes(ion);
  std::unordered_map<int, std::size_t> slot;
  for (std::size_t i = 0; i < modes.size(); ++i) slot[modes[i]] = i;

  std::vector<const Primitive*> steps;
  for (const auto& p : program.primitives()) {
    if (applies_to(p, ion)) steps.push_back(&p);
  }
  const InitialSampler initial_sampler(initial);
  const AtomicParams& params = program.params();

  std::vector<ShardCounts> shards(kMonteCarloShards);
  for_each_shard(samples, seed, threads,
                 [&](unsigned shard, std::uint64_t n, std::mt19937_64& rng) {
                   ShardCounts& counts = shards[shard];
                   counts.per_mode.assign(modes.size(), 0);
                   for (std::uint64_t k = 0; k < n; ++k) {
                     IonState s = initial_sampler.draw(rng);
                     for (const auto* p : steps) step(s, *p, params, rng);
                     if (s.level == Level::DPhoton) {
                       if (auto it = slot.find(s.mode); it != slot.end()) {
                         ++counts.per_mode[it->second];
                         continue;
                       }
                     }
                     const Level bucket = s.shelved ? Level::DShelf : s.level;
                     ++counts.residual[index(bucket)];
                   }
                 });

  std::vector<std::uint64_t> per_mode(modes.size(), 0);
  std::array<std::uint64_t, kLevelCount> residual{};
  for (const auto& c : shards) {
    for (std::size_t i = 0; i < per_mode.size(); ++i) per_mode[i] += c.per_mode[i];
    for (std::size_t i = 0; i < kLevelCount; ++i) residual[i] += c.residual[i];
  }

  MonteCarloEstimate est;
  est.samples = samples;
  const double n = static_cast<double>(samples);
  auto se = [n](double p) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / n); };
  est.profile.modes = modes;
  std::uint64_t emitted = 0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double p = static_cast<double>(per_mode[i]) / n;
    est.profile.per_mode.push_back(p);
    est.per_mode_se.push_back(se(p));
    emitted += per_mode[i];
  }
  est.profile.total = static_cast<double>(emitted) / n;
  est.total_se = se(est.profile.total);
  auto frac = [&](Level l) { return static_cast<double>(residual[index(l)]) / n; };
  est.profile.residuals.s_up = frac(Level::SUp);
  est.profile.residuals.s_down = frac(Level::SDown);
  est.profile.residuals.excited = frac(Level::P);
  est.profile.residuals.d_leak = frac(Level::DLeak);
  est.profile.residuals.d_shelf = frac(Level::DShelf);
  return est;
}

}  // namespace ionmux
