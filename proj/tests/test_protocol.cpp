#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ionmux/config.hpp"
#include "ionmux/errors.hpp"
#include "ionmux/protocol.hpp"

using namespace ionmux;

namespace {

ProtocolSpec preset_spec(const char* name) { return protocol_spec(load_preset(name)); }

int count(const PulseProgram& p, PrimitiveKind kind) {
  int n = 0;
  for (const auto& prim : p.primitives()) n += prim.kind == kind;
  return n;
}

}  // namespace

TEST_CASE("memory model") {
  MemoryParams mem;
  CHECK(memory_fidelity(0.0, mem) == 1.0);
  CHECK(memory_fidelity(mem.tau_coh, mem) == doctest::Approx(0.5 / std::exp(1.0) + 0.5));
  CHECK(memory_fidelity(mem.tau_coh, mem) == doctest::Approx(0.684).epsilon(1e-3));
  CHECK(memory_survival(0.0, mem) == 1.0);
  CHECK(memory_survival(0.3, mem) == doctest::Approx(0.731).epsilon(1e-3));
  CHECK(1 - memory_survival(0.1, mem) == doctest::Approx(0.099).epsilon(0.001 / 0.099));
  CHECK(link_efficiency(1 / 0.234, mem, 0.74) == doctest::Approx(1.157).epsilon(1e-3));
  CHECK(link_efficiency(1 / mem.tau_coh, mem, 1.0) == doctest::Approx(1.0));
  CHECK(link_efficiency(263, mem, 0.89) == doctest::Approx(85.7).epsilon(1e-3));
  MemoryParams bad;
  bad.a = 0.7;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("efficiency chain") {
  EfficiencyChain e;
  CHECK(e.fiber_transmission(0) == 1.0);
  CHECK(e.fiber_transmission(1000) == doctest::Approx(std::pow(10.0, -0.3)));
  e.conversion = 0.5;
  e.other = 0.2;
  CHECK(e.product(0) == doctest::Approx(0.1));
  CHECK(e.product_without_other(0) == doctest::Approx(0.5));
  e.detector = 1.2;
  CHECK_THROWS_AS(e.validate(), ConfigError);
}

TEST_CASE("compiled presets") {
  SUBCASE("3m") {
    const auto p = compile(preset_spec("3m"));
    CHECK(p.mode_count() == 8);
    CHECK(count(p, PrimitiveKind::Pump) == 1);
    CHECK(count(p, PrimitiveKind::Shuttle) == 0);
    const auto t = round_timing(p);
    CHECK(t.active_span == doctest::Approx(340e-9).epsilon(0.1));
  }
  SUBCASE("1km") {
    const auto t = round_timing(compile(preset_spec("1km")));
    CHECK(t.modes == 12);
    CHECK(t.active_span == doctest::Approx(3.3e-6).epsilon(0.1));
  }
  SUBCASE("12km") {
    const auto p = compile(preset_spec("12km"));
    CHECK(p.mode_count() == 44);
    CHECK(count(p, PrimitiveKind::Shuttle) == 4);
    const auto t = round_timing(p);
    CHECK(t.active_span == doctest::Approx(87e-6).epsilon(0.1));
    CHECK(t.t_round == doctest::Approx(p.end_time()));
    CHECK(t.round_trip == doctest::Approx(120e-6));
  }
}

TEST_CASE("overhead total sizes the communication block") {
  auto spec = preset_spec("3m");
  spec.t_ovh = 1e-6;
  const auto t = round_timing(compile(spec));
  CHECK(t.t_ovh == doctest::Approx(1e-6));
  spec.initial_pump_time = 2e-6;
  CHECK_THROWS_AS(compile(spec), ConfigError);
}

TEST_CASE("rates on presets") {
  SUBCASE("3m calibrated") {
    const auto r = simulate_rates(preset_spec("3m"));
    CHECK(r.success_rate == doctest::Approx(263.0).epsilon(1e-9));
    CHECK(r.M_prime == doctest::Approx(3.4).epsilon(0.3));
    CHECK(r.other_efficiency <= 1.0);
  }
  SUBCASE("12km calibrated") {
    const auto r = simulate_rates(preset_spec("12km"));
    CHECK(1.0 / r.success_rate == doctest::Approx(0.234).epsilon(1e-3 / 0.234));
    CHECK(r.eta_link == doctest::Approx(1.16).epsilon(0.02 / 1.16));
    CHECK(r.modes.size() == 44);
    CHECK(r.M_prime == doctest::Approx(15.6).epsilon(0.3));
  }
}

TEST_CASE("rate relations") {
  auto spec = preset_spec("1km");
  spec.target_success_rate.reset();
  const auto r = simulate_rates(spec);
  CHECK(r.success_rate_exact <= r.success_rate);
  CHECK(r.p_round == doctest::Approx(std::accumulate(r.per_mode_p.begin(), r.per_mode_p.end(), 0.0)));
  CHECK(r.attempt_rate == doctest::Approx(r.modes.size() / r.timing.t_round));

  spec.efficiencies.collection = 1e-6;
  const auto weak = simulate_rates(spec);
  CHECK(weak.success_rate_exact == doctest::Approx(weak.success_rate).epsilon(1e-5));

  spec.efficiencies.collection = 0.0;
  const auto dead = simulate_rates(spec);
  CHECK(dead.success_rate == 0.0);
  CHECK(dead.M_prime == 0.0);
}

TEST_CASE("calibration above unity is rejected") {
  auto spec = preset_spec("3m");
  spec.target_success_rate = 1e12;
  CHECK_THROWS_AS(simulate_rates(spec), ConfigError);
}

TEST_CASE("single ion, no shuttles") {
  ProtocolSpec spec;
  spec.per_ion_strategy = Strategy::named("every", 4);
  const auto p = compile(spec);
  CHECK(count(p, PrimitiveKind::Shuttle) == 0);
  CHECK(p.mode_count() == 4);
}
