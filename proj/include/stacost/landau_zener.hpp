#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stacost/ramp.hpp"
#include "stacost/two_level.hpp"

namespace stacost {

enum class LzProtocol { bare, cd, lcd, bob, oc };

std::string to_string(LzProtocol p);
LzProtocol lz_protocol_from_string(const std::string& name);

/// Landau-Zener sweep H0 = gap sigma_x / 2 + g(t) sigma_z / 2 from g0 to g1.
struct LzConfig {
  double gap = 0.1;
  double g0 = -0.2;
  double g1 = 0.2;
  double duration = 1.0;

  void validate() const;
  Ramp quintic_ramp() const { return poly_smooth_ramp(g0, g1 - g0, duration); }
  QubitState initial_state() const;
  QubitState target_state() const;
};

/// Ground state of gap sigma_x / 2 + g sigma_z / 2.
QubitState lz_ground_state(double gap, double g);

PauliSchedule lz_bare(double gap, const Ramp& ramp);
/// Bare plus -g' gap / (2 (gap^2 + g^2)) sigma_y.
PauliSchedule lz_cd(double gap, const Ramp& ramp);
/// P sigma_x / 2 + (g - eta') sigma_z / 2 with P = sqrt(gap^2 + theta'^2).
PauliSchedule lz_lcd(double gap, const Ramp& ramp);
PauliSchedule lz_schedule(LzProtocol protocol, double gap, const Ramp& ramp);

/// Local counterdiabatic coefficients for one instant of a ramp sample.
PauliCoefficients lz_lcd_coefficients(double gap, const RampSample& g);
/// theta' = -g' gap / (gap^2 + g^2), the sigma_y coefficient of the counterdiabatic term.
double lz_theta_rate(double gap, const RampSample& g);

/// Warning text when the ramp lacks the flat endpoints the local protocol needs.
std::optional<std::string> lcd_ramp_warning(const Ramp& ramp);

/// (2 / gap) arccos(|a_i a_t| + |b_i b_t|).
double qsl_time(double gap, const QubitState& initial, const QubitState& target);
double qsl_time(const LzConfig& cfg);

struct BobKicks {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double fidelity = 0.0;
  double duration = 0.0;
  double amplitude = 0.0;
  bool success = false;

  Ramp ramp() const { return bob_pulse(amplitude, duration, phi1, phi2); }
};

/// Deterministic 64x64 angle grid followed by simplex refinement, at tau = tau_QSL.
BobKicks optimize_bob_kicks(const LzConfig& cfg, double amplitude = 100.0, int grid = 64);

/// Analytic rectangle contribution of the two kicks to the time-averaged cost.
double bob_kick_cost(double gap, const Ramp& bob);

struct DecompositionPoint {
  double s = 0.0;
  double energy_sq_sum = 0.0;    // sum_n E_n^2
  double coupling_sq_sum = 0.0;  // sum_{n != a} |A_{n,a}|^2, derivatives in s
};

/// Spectral decomposition of the counterdiabatic cost along the scaled path.
std::vector<DecompositionPoint> cd_cost_decomposition(double gap, const Ramp& ramp,
                                                      const std::vector<double>& s_grid);
/// int_0^1 [sum E^2 + tau^-2 sum |A|^2]^(1/2) ds by Simpson on the eigenbasis route.
double decomposition_cost(double gap, const Ramp& ramp, std::size_t quadrature_steps = 20000);
/// int_0^1 sqrt((gap^2 + g^2) / 2) ds, the large-duration limit.
double adiabatic_cost(double gap, const Ramp& ramp, std::size_t quadrature_steps = 20000);

struct LzRun {
  double final_fidelity = 0.0;
  double cost = 0.0;
  std::size_t steps = 0;
};

/// Propagates the initial ground state and integrates the cost of one protocol.
LzRun run_lz(LzProtocol protocol, const LzConfig& cfg, const Ramp& ramp,
             std::size_t steps = 10000);

using RampFactory = std::function<Ramp(double duration)>;

struct ScanSeries {
  std::string name;
  LzProtocol protocol = LzProtocol::cd;
  RampFactory ramp;
};

struct CostTable {
  std::vector<std::string> columns;
  std::vector<double> durations;
  std::vector<std::vector<double>> costs;  // [row][column]
};

/// Integrated cost of each series at each duration; cells are independent.
CostTable cost_scan(double gap, const std::vector<double>& durations,
                    const std::vector<ScanSeries>& series, int threads = 1,
                    std::size_t quadrature_steps = 20000);

/// Bisection on the sign of diff(tau) inside the first bracket of the grid where it changes.
std::optional<double> locate_crossover(const std::function<double(double)>& diff,
                                       const std::vector<double>& grid, double tol = 1e-3);

/// Crossover of the CD and LCD costs for the quintic ramp.
std::optional<double> cd_lcd_crossover(const LzConfig& cfg, const std::vector<double>& grid,
                                       double tol = 1e-3);

}  // namespace stacost
