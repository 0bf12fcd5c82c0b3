#include <doctest.h>

#include <cmath>
#include <random>

#include "ionmux/atomic_model.hpp"
#include "ionmux/errors.hpp"
#include "oracles.hpp"

using namespace ionmux;

namespace {

double row_sum(const TransitionMap& m, Level from) {
  double s = 0.0;
  for (Level to : kAllLevels) s += m(from, to);
  return s;
}

void check_stochastic(const TransitionMap& m) {
  for (Level from : kAllLevels) {
    CHECK(row_sum(m, from) == doctest::Approx(1.0).epsilon(1e-12));
    for (Level to : kAllLevels) {
      CHECK(m(from, to) >= 0.0);
      CHECK(m(from, to) <= 1.0);
    }
  }
}

}  // namespace

TEST_CASE("default params are consistent") {
  AtomicParams p;
  CHECK(p.p_br_d + p.p_br_s() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.w_up + p.w_down() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.p_br_d == 0.06);
  CHECK(p.tau_p == 7e-9);
}

TEST_CASE("excitation from S_up with an open window") {
  const auto m = excitation_map({}, kInfiniteWindow, 0);
  const auto out = m.apply(PopulationVector::pure(Level::SUp));
  CHECK(out.s_up == doctest::Approx(0.94 * 2.0 / 3.0).epsilon(1e-12));
  CHECK(out.s_up == doctest::Approx(0.627).epsilon(1e-3));
  CHECK(out.s_down == doctest::Approx(0.3133).epsilon(1e-3));
  CHECK(out.photon_in_mode(0) == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(out.excited == 0.0);
}

TEST_CASE("metastable population ignores excitation") {
  const auto in = PopulationVector::pure(Level::DPhoton, 3);
  for (double w : {13e-9, 200e-9, kInfiniteWindow}) {
    const auto out = excitation_map({}, w, 7).apply(in);
    CHECK(out.photon_in_mode(3) == 1.0);
    CHECK(out.total() == doctest::Approx(1.0));
  }
}

TEST_CASE("13 ns window carries the undecayed fraction to the next pulse") {
  AtomicParams p;
  const auto first = excitation_map(p, 13e-9, 0).apply(PopulationVector::pure(Level::SUp));
  CHECK(first.excited == doctest::Approx(std::exp(-13.0 / 7.0)).epsilon(1e-12));
  CHECK(first.excited == doctest::Approx(0.1563).epsilon(1e-3));
  // The next pulse flips it back down without emission from that mass.
  const auto flip = excitation_map(p, 13e-9, 1).apply(PopulationVector::pure(Level::P));
  CHECK(flip.s_up == 1.0);
  CHECK(flip.photon_in_mode(1) == 0.0);
}

TEST_CASE("open window is the limit of long windows") {
  AtomicParams p;
  const auto inf = excitation_map(p, kInfiniteWindow, 0);
  const auto w = excitation_map(p, 50 * p.tau_p, 0);
  for (Level a : kAllLevels) {
    for (Level b : kAllLevels) CHECK(std::abs(inf(a, b) - w(a, b)) < 1e-9);
  }
}

TEST_CASE("pump split from S_down") {
  AtomicParams p;
  const auto out = pump_map(p).apply(PopulationVector::pure(Level::SDown));
  CHECK(out.s_up == doctest::Approx(0.839).epsilon(1e-3));
  CHECK(out.d_leak == doctest::Approx(0.161).epsilon(1e-3));
  CHECK(out.s_up == doctest::Approx(oracle::pump_return_series(p)).epsilon(1e-12));
  CHECK(pump_return_fraction(p) ==
        doctest::Approx(p.p_br_s() * p.w_down() / (p.p_br_s() * p.w_down() + p.p_br_d)));
}

TEST_CASE("pump fixed points") {
  const auto m = pump_map({});
  CHECK(m.apply(PopulationVector::pure(Level::SUp)).s_up == 1.0);
  const auto d = m.apply(PopulationVector::pure(Level::DPhoton, 2));
  CHECK(d.photon_in_mode(2) == 1.0);
  CHECK(m.apply(PopulationVector::pure(Level::DLeak)).d_leak == 1.0);
}

TEST_CASE("pump split equals the power-iterated single cycle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = oracle::random_params(rng);
    const auto cycle = pump_cycle_map(p);
    auto v = PopulationVector::pure(Level::SDown);
    for (int k = 0; k < 5000 && v.s_down > 1e-16; ++k) v = cycle.apply(v);
    CHECK(std::abs(v.s_up - pump_return_fraction(p)) < 1e-10);
    CHECK(std::abs(v.d_leak - (1.0 - pump_return_fraction(p))) < 1e-10);
  }
}

TEST_CASE("every map is row-stochastic") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_params(rng);
    std::uniform_real_distribution<double> w(1e-9, 100e-9);
    check_stochastic(excitation_map(p, w(rng), 0));
    check_stochastic(excitation_map(p, kInfiniteWindow, 0));
    check_stochastic(pump_map(p));
    check_stochastic(pump_cycle_map(p));
    check_stochastic(wait_map(p, w(rng)));
  }
  check_stochastic(shelve_map(ShelveDirection::ToShelf));
  check_stochastic(shelve_map(ShelveDirection::FromShelf));
  check_stochastic(reset_map());
}

TEST_CASE("long map sequences conserve population") {
  AtomicParams p;
  auto v = PopulationVector::pure(Level::SUp);
  const auto pump = pump_map(p);
  const auto wait = wait_map(p, 3e-9);
  for (int k = 0; k < 10000; ++k) {
    v = excitation_map(p, 5e-9, k).apply(v);
    if (k % 3 == 0) v = wait.apply(v);
    if (k % 5 == 4) v = pump.apply(v);
  }
  CHECK(std::abs(v.total() - 1.0) < 1e-9);
}

TEST_CASE("shelving") {
  PopulationVector v;
  v.photon[0] = 0.3;
  v.s_up = 0.7;
  const auto to = shelve_map(ShelveDirection::ToShelf);
  const auto from = shelve_map(ShelveDirection::FromShelf);
  const auto shelved = to.apply(v);
  CHECK(shelved[Level::DShelf] == doctest::Approx(0.3));
  CHECK(shelved[Level::DPhoton] == 0.0);
  CHECK(shelved.s_up == 0.7);

  SUBCASE("round trip restores the split") {
    PopulationVector w;
    w.s_up = 0.2;
    w.s_down = 0.1;
    w.excited = 0.05;
    w.d_leak = 0.25;
    w.photon[1] = 0.15;
    w.photon[4] = 0.25;
    const auto back = from.apply(to.apply(w));
    CHECK(back.s_up == w.s_up);
    CHECK(back.s_down == w.s_down);
    CHECK(back.excited == w.excited);
    CHECK(back.d_leak == w.d_leak);
    CHECK(back.photon == w.photon);
    CHECK_FALSE(back.shelf.has_value());
  }
  SUBCASE("ground population is untouched") {
    const auto out = to.apply(PopulationVector::pure(Level::SDown));
    CHECK(out.s_down == 1.0);
  }
  SUBCASE("unshelve without a record") {
    CHECK_THROWS_AS(from.apply(PopulationVector::pure(Level::SUp)), ProtocolError);
  }
}

TEST_CASE("wait decays P without collection") {
  AtomicParams p;
  const auto out = wait_map(p, 7e-9).apply(PopulationVector::pure(Level::P));
  const double g = 1.0 - std::exp(-1.0);
  CHECK(out.excited == doctest::Approx(1.0 - g));
  CHECK(out.d_leak == doctest::Approx(g * 0.06));
  CHECK(out[Level::DPhoton] == 0.0);
}

TEST_CASE("reset returns everything to S_up") {
  PopulationVector v;
  v.s_down = 0.4;
  v.photon[2] = 0.6;
  const auto out = reset_map().apply(shelve_map(ShelveDirection::ToShelf).apply(v));
  CHECK(out.s_up == doctest::Approx(1.0));
  CHECK_FALSE(out.shelf.has_value());
}

TEST_CASE("errors") {
  AtomicParams bad;
  bad.p_br_d = 1.5;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = {};
  bad.tau_p = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  CHECK_THROWS_AS(excitation_map({}, 0.0, 0), ParameterError);
  CHECK_THROWS_AS(excitation_map({}, -1e-9, 0), ParameterError);
  const auto once = excitation_map({}, kInfiniteWindow, 0).apply(PopulationVector::pure(Level::SUp));
  CHECK_THROWS_AS(excitation_map({}, kInfiniteWindow, 0).apply(once), ProtocolError);
}

TEST_CASE("pump without any exit leaves S_down alone") {
  AtomicParams p;
  p.p_br_d = 0.0;
  p.w_up = 1.0;
  const auto out = pump_map(p).apply(PopulationVector::pure(Level::SDown));
  CHECK(out.s_down == 1.0);
}
