#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ionmux/errors.hpp"
#include "ionmux/link_timing.hpp"

using namespace ionmux;

namespace {

LinkParams twelve_km(int n) {
  LinkParams l;
  l.length = 12000;
  l.t_ovh = 50e-6;
  l.dt = 2e-6;
  l.modes = n;
  return l;
}

}  // namespace

TEST_CASE("one mode is the reference") {
  auto l = twelve_km(1);
  CHECK(t_eff(l) == l.single_mode_time());
  CHECK(enhancement(l) == 1.0);
}

TEST_CASE("long link numbers") {
  const auto l = twelve_km(85);
  CHECK(t_eff(l) == doctest::Approx(4e-6).epsilon(1e-12));
  CHECK(enhancement(l) == doctest::Approx(43.0).epsilon(1e-12));
  CHECK(n_half_duty(l) == doctest::Approx(85.0).epsilon(1e-12));
  CHECK(duty_cycle(l) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("many-mode limit") {
  auto l = twelve_km(1000000000);
  CHECK(std::abs(t_eff(l) / l.dt - 1.0) < 1e-6);
  CHECK(std::abs(enhancement(l) / (l.single_mode_time() / l.dt) - 1.0) < 1e-6);
}

TEST_CASE("no time-bin spacing") {
  auto l = twelve_km(10);
  l.dt = 0.0;
  CHECK(std::isinf(n_half_duty(l)));
  CHECK(enhancement(l) == doctest::Approx(10.0));
}

TEST_CASE("inhomogeneous enhancement") {
  const auto l = twelve_km(4);
  const std::vector<double> flat(4, 0.02);
  CHECK(enhancement_inhomogeneous(l, flat, 0.02) == doctest::Approx(enhancement(l)));
  const std::vector<double> zero(4, 0.0);
  CHECK(enhancement_inhomogeneous(l, zero, 0.02) == 0.0);
  CHECK_THROWS_AS(enhancement_inhomogeneous(l, flat, 0.0), ParameterError);
  const std::vector<double> half{0.02, 0.01, 0.01, 0.0};
  CHECK(enhancement_inhomogeneous(l, half, 0.02) == doctest::Approx(enhancement(l) * 0.5));
}

TEST_CASE("property draws") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> len(0, 50000), ovh(0, 1e-3), dt(1e-9, 1e-5);
  for (int k = 0; k < 2000; ++k) {
    LinkParams l;
    l.length = len(rng);
    l.t_ovh = ovh(rng);
    l.dt = dt(rng);
    l.modes = 1 + static_cast<int>(rng() % 500);
    const double m = enhancement(l);
    CHECK(m >= 1.0 - 1e-12);
    CHECK(m <= l.modes * (1 + 1e-12));
    // Doubling N never doubles M.
    auto l2 = l;
    l2.modes = 2 * l.modes;
    CHECK(enhancement(l2) < 2 * m);
    CHECK(enhancement(l2) >= m);
  }
}

TEST_CASE("integer half-duty point") {
  for (int n0 : {1, 2, 7, 85, 400}) {
    LinkParams l;
    l.dt = 1.0;
    l.t_ovh = n0;
    l.modes = n0;
    CHECK(enhancement(l) == static_cast<double>(n0 + 1) / 2.0);
  }
}

TEST_CASE("curve") {
  LinkParams l;
  l.length = 1000;
  l.dt = 1e-6;
  const auto c = enhancement_curve(l, 40);
  REQUIRE(c.points.size() == 40);
  CHECK(c.n_half == doctest::Approx(10.0));
  CHECK(c.m_saturated == doctest::Approx(5.5));
  for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].m > c.points[i - 1].m);
}

TEST_CASE("validation") {
  LinkParams l;
  l.modes = 0;
  CHECK_THROWS_AS(t_eff(l), ParameterError);
  l.modes = 1;
  l.length = -1;
  CHECK_THROWS_AS(l.validate(), ParameterError);
}
