#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "stacost/landau_zener.hpp"

using namespace stacost;

namespace {

LzConfig sweep(double tau) {
  LzConfig c;
  c.duration = tau;
  return c;
}

double mixing_angle(double gap, double g) { return std::atan2(gap, g); }

}  // namespace

TEST_CASE("speed-limit time of the symmetric sweep") {
  const double gap = 0.1, g0 = 0.2;
  const double expect = 2.0 / gap * std::acos(gap / std::hypot(gap, g0));
  CHECK(qsl_time(sweep(1.0)) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(qsl_time(sweep(1.0)) == doctest::Approx(22.14297).epsilon(1e-6));
}

TEST_CASE("counterdiabatic coefficient is the mixing-angle rate") {
  const double gap = 0.1;
  const Ramp r = poly_smooth_ramp(-0.2, 0.4, 5.0);
  auto theta = [&](double t) { return mixing_angle(gap, r.value(t)); };
  for (double t : {0.3, 1.1, 2.5, 3.7, 4.6}) {
    const double fd = oracle::central_diff(theta, t, 1e-5);
    CHECK(lz_theta_rate(gap, r.sample(t)) == doctest::Approx(fd).epsilon(1e-7));
    CHECK(lz_cd(gap, r)(t).y == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("local counterdiabatic coefficients") {
  const double gap = 0.1;
  const Ramp r = poly_smooth_ramp(-0.2, 0.4, 3.0);
  auto eta = [&](double t) { return std::atan(lz_theta_rate(gap, r.sample(t)) / gap); };
  for (double t : {0.4, 1.2, 1.5, 2.2, 2.8}) {
    const PauliCoefficients c = lz_lcd_coefficients(gap, r.sample(t));
    const double rate = lz_theta_rate(gap, r.sample(t));
    CHECK(c.y == 0.0);
    CHECK(c.x == doctest::Approx(std::hypot(gap, rate)).epsilon(1e-14));
    CHECK(c.z == doctest::Approx(r.value(t) - oracle::central_diff(eta, t, 1e-5)).epsilon(1e-7));
  }
}

TEST_CASE("shortcut protocols reach the target state") {
  for (double tau : {0.1, 1.0, 22.14, 60.0}) {
    const LzConfig c = sweep(tau);
    CHECK(run_lz(LzProtocol::cd, c, c.quintic_ramp()).final_fidelity >= 1.0 - 1e-8);
    CHECK(run_lz(LzProtocol::lcd, c, c.quintic_ramp()).final_fidelity >= 1.0 - 1e-8);
  }
  const LzConfig fast = sweep(1.0);
  CHECK(run_lz(LzProtocol::bare, fast, fast.quintic_ramp()).final_fidelity < 0.5);
}

TEST_CASE("shortcut fidelity holds with an independent integrator") {
  const LzConfig c = sweep(2.0);
  const PauliSchedule s = lz_lcd(c.gap, c.quintic_ramp());
  const QubitState psi =
      oracle::rk4_schrodinger([&](double t) { return s(t); }, 2.0, c.initial_state(), 40000);
  CHECK(fidelity(psi, c.target_state()) >= 1.0 - 1e-8);
}

TEST_CASE("cost ordering of the two shortcuts changes with duration") {
  const LzConfig fast = sweep(1.0), slow = sweep(50.0);
  const double cd_fast = run_lz(LzProtocol::cd, fast, fast.quintic_ramp()).cost;
  const double lcd_fast = run_lz(LzProtocol::lcd, fast, fast.quintic_ramp()).cost;
  const double cd_slow = run_lz(LzProtocol::cd, slow, slow.quintic_ramp()).cost;
  const double lcd_slow = run_lz(LzProtocol::lcd, slow, slow.quintic_ramp()).cost;
  CHECK(cd_fast < lcd_fast);
  CHECK(lcd_slow < cd_slow);
  CHECK(cd_fast == doctest::Approx(1.6005).epsilon(1e-3));
  CHECK(lcd_fast == doctest::Approx(3.5111).epsilon(1e-3));
  // Each shortcut costs at least the bare sweep, whose cost is the adiabatic integral.
  const double bare = integrated_cost(lz_bare(0.1, slow.quintic_ramp()), 20000);
  CHECK(bare == doctest::Approx(adiabatic_cost(0.1, slow.quintic_ramp())).epsilon(1e-9));
  CHECK(cd_slow > bare);
}

TEST_CASE("bare linear sweep cost has a closed form") {
  const double gap = 0.1;
  for (double tau : {1.0, 10.0}) {
    const Ramp r = oc_fourier_ramp(-0.2, tau, {});
    const double expect =
        (oracle::hyperbola_integral(gap, 0.2) - oracle::hyperbola_integral(gap, -0.2)) /
        (0.4 * std::sqrt(2.0));
    CHECK(integrated_cost(lz_bare(gap, r), 2000) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("spectral decomposition reproduces the direct cost") {
  for (double tau : {0.5, 3.0, 30.0}) {
    const Ramp r = poly_smooth_ramp(-0.2, 0.4, tau);
    CHECK(decomposition_cost(0.1, r) ==
          doctest::Approx(integrated_cost(lz_cd(0.1, r), 20000)).epsilon(1e-6));
  }
  const auto pts = cd_cost_decomposition(0.1, poly_smooth_ramp(-0.2, 0.4, 1.0), {0.0, 0.5, 1.0});
  CHECK(pts[0].coupling_sq_sum == doctest::Approx(0.0));
  CHECK(pts[1].energy_sq_sum == doctest::Approx(0.5 * 0.01));
}

TEST_CASE("optimised ramp lowers the counterdiabatic cost") {
  for (double tau : {0.5, 2.0, 10.0}) {
    const Ramp quintic = poly_smooth_ramp(-0.2, 0.4, tau);
    const Ramp opt = optimal_cd_ramp(0.1, -0.2, 0.2, tau);
    const double a = integrated_cost(lz_cd(0.1, opt), 20000);
    const double b = integrated_cost(lz_cd(0.1, quintic), 20000);
    CHECK(a <= b);
    const LzConfig c = sweep(tau);
    CHECK(run_lz(LzProtocol::cd, c, opt).final_fidelity >= 1.0 - 1e-8);
  }
}

TEST_CASE("bang-off-bang kicks at the speed limit") {
  const LzConfig c = sweep(1.0);
  const BobKicks b = optimize_bob_kicks(c);
  CHECK(b.success);
  CHECK(b.fidelity >= 0.999);
  CHECK(b.duration == doctest::Approx(qsl_time(c)).epsilon(1e-12));
  const Ramp r = b.ramp();
  const QubitState psi = propagate_final(lz_bare(c.gap, r), c.initial_state(), 100);
  CHECK(fidelity(psi, c.target_state()) >= 0.999);

  // Brute-force midpoint sum of the cost rate over a fine grid.
  const std::size_t n = 2'000'000;
  const PauliSchedule s = lz_bare(c.gap, r);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += cost_rate(s, (i + 0.5) * b.duration / n);
  const double brute = sum / n;
  const double kick_time = (b.phi1 + b.phi2) / b.amplitude;
  const double free = c.gap / std::sqrt(2.0) * (1.0 - kick_time / b.duration);
  CHECK(bob_kick_cost(c.gap, r) + free == doctest::Approx(brute).epsilon(1e-5));
  CHECK(integrated_cost(s) == doctest::Approx(brute).epsilon(1e-5));
  CHECK_THROWS_AS(bob_kick_cost(c.gap, c.quintic_ramp()), std::invalid_argument);
}

TEST_CASE("crossover bisection") {
  const auto root = locate_crossover([](double t) { return t - 3.3; }, {1.0, 2.0, 4.0, 8.0}, 1e-9);
  REQUIRE(root);
  CHECK(*root == doctest::Approx(3.3).epsilon(1e-8));
  CHECK_FALSE(locate_crossover([](double t) { return t + 1.0; }, {1.0, 2.0, 4.0}));
}

TEST_CASE("crossover scales inversely with the gap") {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.5 * std::pow(200.0, i / 40.0));
  LzConfig base;
  const auto t1 = cd_lcd_crossover(base, grid);
  LzConfig doubled = base;
  doubled.gap *= 2;
  doubled.g0 *= 2;
  doubled.g1 *= 2;
  const auto t2 = cd_lcd_crossover(doubled, grid);
  REQUIRE(t1);
  REQUIRE(t2);
  CHECK(*t1 == doctest::Approx(11.11).epsilon(2e-3));
  CHECK(*t2 == doctest::Approx(*t1 / 2).epsilon(1e-3));
}

TEST_CASE("local protocol warns about ramps without flat endpoints") {
  CHECK_FALSE(lcd_ramp_warning(poly_smooth_ramp(-0.2, 0.4, 2.0)));
  CHECK(lcd_ramp_warning(cd_na_ramp(0.1, -0.2, 0.2, 2.0)));
}

TEST_CASE("cost scan does not depend on the thread count") {
  const std::vector<double> taus{0.3, 1.0, 4.0, 12.0, 40.0};
  const std::vector<ScanSeries> series{
      {"cd", LzProtocol::cd, [](double t) { return poly_smooth_ramp(-0.2, 0.4, t); }},
      {"lcd", LzProtocol::lcd, [](double t) { return poly_smooth_ramp(-0.2, 0.4, t); }},
  };
  const CostTable one = cost_scan(0.1, taus, series, 1, 4000);
  const CostTable three = cost_scan(0.1, taus, series, 3, 4000);
  CHECK(one.columns == std::vector<std::string>{"cd", "lcd"});
  CHECK(one.costs == three.costs);
}

TEST_CASE("protocol names round trip") {
  for (auto p : {LzProtocol::bare, LzProtocol::cd, LzProtocol::lcd, LzProtocol::bob, LzProtocol::oc})
    CHECK(lz_protocol_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(lz_protocol_from_string("fast"), std::invalid_argument);
}
