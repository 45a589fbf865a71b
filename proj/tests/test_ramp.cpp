#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "stacost/ramp.hpp"

using namespace stacost;

namespace {

void check_derivatives(const Ramp& r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double tau = r.duration();
  std::uniform_real_distribution<double> pick(0.02 * tau, 0.98 * tau);
  const double h = 1e-4 * tau;
  auto v = [&](double t) { return r.value(t); };
  auto d1 = [&](double t) { return r.deriv1(t); };
  for (int i = 0; i < 100; ++i) {
    const double t = pick(rng);
    const RampSample s = r.sample(t);
    const double scale1 = 1.0 + std::abs(s.deriv1);
    const double scale2 = 1.0 + std::abs(s.deriv2);
    CHECK(std::abs(oracle::central_diff(v, t, h) - s.deriv1) < 1e-6 * scale1);
    CHECK(std::abs(oracle::central_diff(d1, t, h) - s.deriv2) < 1e-5 * scale2);
  }
}

}  // namespace

TEST_CASE("smooth polynomial ramp boundary values and midpoint slope") {
  const Ramp r = poly_smooth_ramp(-0.2, 0.4, 1.0);
  CHECK(r.value(0.0) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(r.value(1.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(r.value(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  // d/ds (10 s^3 - 15 s^4 + 6 s^5) at s = 1/2 is 15/8
  CHECK(r.deriv1(0.5) == doctest::Approx(1.875 * 0.4));
  CHECK(r.has_flat_endpoints());
  for (double t : {0.0, 1.0}) {
    CHECK(std::abs(r.deriv1(t)) < 1e-15);
    CHECK(std::abs(r.deriv2(t)) < 1e-15);
  }
  CHECK(r.pieces().size() == 1);
  CHECK(r.kind() == RampKind::polynomial);
}

TEST_CASE("ramp derivatives agree with finite differences at random points") {
  check_derivatives(poly_smooth_ramp(-0.2, 0.4, 3.0), 1);
  check_derivatives(oc_fourier_ramp(-0.2, 30.0, {{0.01, 0.3}, {-0.02, 1.7}, {0.005, 4.0}}), 2);
  check_derivatives(cd_na_ramp(0.1, -0.2, 0.2, 2.0), 3);
  check_derivatives(cd_a_ramp(-0.2, 5.0, 2.0), 4);
  check_derivatives(optimal_cd_ramp(0.1, -0.2, 0.2, 7.0), 5);
}

TEST_CASE("scaled-time derivatives are duration multiples") {
  const Ramp r = poly_smooth_ramp(-0.2, 0.4, 4.0);
  const RampSample a = r.sample(1.0);
  const RampSample b = r.sample_scaled(0.25);
  CHECK(b.value == doctest::Approx(a.value));
  CHECK(b.deriv1 == doctest::Approx(a.deriv1 * 4.0));
  CHECK(b.deriv2 == doctest::Approx(a.deriv2 * 16.0));
}

TEST_CASE("bang-off-bang pulse pieces") {
  const double tau = 22.0;
  const Ramp r = bob_pulse(100.0, tau, 1.5, 0.5);
  CHECK(r.value(0.0) == 100.0);
  CHECK(r.value(0.0149) == 100.0);
  CHECK(r.value(0.0151) == 0.0);
  CHECK(r.value(tau / 2) == 0.0);
  CHECK(r.value(tau - 0.0049) == -100.0);
  CHECK(r.deriv1(0.01) == 0.0);
  const auto pieces = r.pieces();
  REQUIRE(pieces.size() == 3);
  for (const auto& p : pieces) CHECK(p.constant);
  CHECK(pieces[0].end == doctest::Approx(0.015));
  CHECK(pieces[2].begin == doctest::Approx(tau - 0.005));
  CHECK_THROWS_AS(bob_pulse(1.0, 2.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("fourier ramp with zero amplitudes is the linear sweep") {
  const Ramp r = oc_fourier_ramp(-0.2, 10.0, std::vector<FourierTerm>(5, {0.0, 1.0}));
  for (double t : {0.0, 2.5, 5.0, 10.0}) CHECK(r.value(t) == doctest::Approx(-0.2 + 0.04 * t));
  const Ramp one = oc_fourier_ramp(-0.2, 10.0, {{0.1, 0.0}, {0.0, 0.0}, {0.05, 0.5}});
  const double t = 3.7;
  const double expect = -0.2 + 0.04 * t + 0.1 * std::sin(std::numbers::pi * t / 10.0) +
                        0.05 * std::sin(3.0 * std::numbers::pi * t / 10.0 + 0.5);
  CHECK(one.value(t) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("optimised counterdiabatic ramps hit both boundary values") {
  const Ramp na = cd_na_ramp(0.1, -0.2, 0.2, 1.0);
  CHECK(na.value(0.0) == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(na.value(1.0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK_FALSE(na.has_flat_endpoints());
  const Ramp a = cd_a_ramp(-0.2, 40.0, 1.0);
  CHECK(a.value(0.0) == doctest::Approx(-0.2 * std::tanh(40.0)));
  CHECK(a.value(1.0) == doctest::Approx(0.2 * std::tanh(40.0)));
  CHECK(a.value(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(cd_a_ramp_for(-0.2, 0.3), std::invalid_argument);
}

TEST_CASE("blend weight and convex combination") {
  CHECK(blend_weight(0.1, 10.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(blend_weight(0.1, 0.0) == 0.0);
  const double tau = 3.0;
  const Ramp a = cd_a_ramp(-0.2, 40.0, tau);
  const Ramp na = cd_na_ramp(0.1, -0.2, 0.2, tau);
  const Ramp mix = cd_blended_ramp(a, na, 0.1, tau);
  const double f = blend_weight(0.1, tau);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pick(0.0, tau);
  for (int i = 0; i < 100; ++i) {
    const double t = pick(rng);
    CHECK(mix.value(t) == doctest::Approx(f * a.value(t) + (1 - f) * na.value(t)).epsilon(1e-14));
    CHECK(mix.deriv1(t) ==
          doctest::Approx(f * a.deriv1(t) + (1 - f) * na.deriv1(t)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cd_blended_ramp(cd_a_ramp(-0.3, 40.0, tau), na, 0.1, tau), std::invalid_argument);
}

TEST_CASE("ramp JSON round trip") {
  const std::vector<Ramp> ramps{
      poly_smooth_ramp(-0.2, 0.4, 2.0),
      bob_pulse(100.0, 22.0, 1.2, 1.9),
      oc_fourier_ramp(-0.2, 30.0, {{0.01, 0.3}, {-0.02, 1.7}}),
      cd_na_ramp(0.1, -0.2, 0.2, 2.0),
      cd_a_ramp(-0.2, 40.0, 2.0),
      optimal_cd_ramp(0.1, -0.2, 0.2, 2.0),
  };
  for (const Ramp& r : ramps) {
    const Ramp back = ramp_from_json(ramp_to_json(r));
    CHECK(back.kind() == r.kind());
    CHECK(back.duration() == r.duration());
    for (double s : {0.1, 0.37, 0.5, 0.91}) {
      const double t = s * r.duration();
      CHECK(back.value(t) == r.value(t));
      CHECK(back.deriv1(t) == r.deriv1(t));
    }
  }
  CHECK_THROWS_AS(ramp_from_json({{"kind", "spline"}, {"duration", 1.0}}), std::invalid_argument);
}
