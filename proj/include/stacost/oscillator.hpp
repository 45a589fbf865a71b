#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stacost {

struct FrequencySample {
  double omega = 0.0;
  double omega_dot = 0.0;
  double omega_ddot = 0.0;
};

/// Trap frequency omega(t) on [0, duration] with closed-form derivatives.
class FrequencySchedule {
 public:
  using Sampler = std::function<FrequencySample(double)>;

  FrequencySchedule(double initial, double final_value, double duration, Sampler sampler,
                    std::vector<double> breakpoints = {});

  /// omega0 + omega_d (10 s^3 - 15 s^4 + 6 s^5), omega_d = omega1 - omega0.
  static FrequencySchedule quintic(double omega0, double omega1, double duration);
  static FrequencySchedule constant(double omega, double duration);
  /// Sudden jump omega0 -> omega1 at quench_time.
  static FrequencySchedule quench(double omega0, double omega1, double quench_time,
                                  double duration);

  FrequencySample operator()(double t) const { return sampler_(t); }
  double initial() const { return initial_; }
  double final_value() const { return final_; }
  double duration() const { return duration_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  double initial_;
  double final_;
  double duration_;
  Sampler sampler_;
  std::vector<double> breakpoints_;
};

/// Classical force-free solutions (X, Y) and the Ermakov scale b on a shared grid.
struct OscillatorSolution {
  std::vector<double> times;
  std::vector<double> x, x_dot, y, y_dot;
  std::vector<double> b, b_dot;

  double wronskian(std::size_t i) const { return x[i] * y_dot[i] - x_dot[i] * y[i]; }
  double max_wronskian_drift() const;
};

/// Thrown when the counterdiabatic trap would invert (omega^2 <= omega_dot^2 / (4 omega^2)).
class TrapInversionError : public std::domain_error {
 public:
  TrapInversionError(const std::string& what, double time)
      : std::domain_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// RK4 for X'' + omega^2 X = 0 from (0, 1) and (1, 0); refines until the Wronskian drifts
/// less than 1e-9 (throws if 1e-6 cannot be reached).
OscillatorSolution classical_solutions(const FrequencySchedule& sched, std::size_t steps = 0);

/// Same with omega^2 replaced by a caller-supplied squared frequency.
OscillatorSolution classical_solutions(const std::function<double(double)>& squared_frequency,
                                       double duration, std::size_t steps,
                                       const std::vector<double>& breakpoints = {});

/// b'' + omega^2 b = omega0^2 / b^3, b(0) = 1, b'(0) = 0; fills sol.b and sol.b_dot.
void ermakov_solve(const FrequencySchedule& sched, OscillatorSolution& sol);
OscillatorSolution ermakov_solve(const FrequencySchedule& sched, std::size_t steps);

/// Husimi adiabaticity parameter at grid index i for a trap of frequency omega.
double husimi_qstar(double omega0, double omega, const OscillatorSolution& sol, std::size_t i);
double husimi_qstar(const FrequencySchedule& sched, const OscillatorSolution& sol, std::size_t i);

/// [1 - omega_dot^2 / (4 omega^4)]^(-1/2); TrapInversionError outside the valid region.
double qstar_cd(const FrequencySchedule& sched, double t);
/// Omega^2 = omega^2 - 3 omega_dot^2 / (4 omega^2) + omega_ddot / (2 omega).
double lcd_squared_frequency(const FrequencySchedule& sched, double t);
/// 1 + omega_dot^2 / (8 omega^4).
double qstar_ie(const FrequencySchedule& sched, double t);
/// Mean energy from the Ermakov scale at grid index i.
double ie_energy(const FrequencySchedule& sched, const OscillatorSolution& sol, std::size_t i,
                 double beta);

/// First time on a dense grid where the counterdiabatic constraint fails.
std::optional<double> cd_violation_time(const FrequencySchedule& sched, std::size_t samples = 20000);
/// Smallest quintic duration with a valid counterdiabatic trap, by bisection.
double cd_min_valid_duration(double omega0, double omega1, double tol = 1e-6);

enum class OscProtocol { bare, cd, lcd, ie };
std::string to_string(OscProtocol p);
OscProtocol osc_protocol_from_string(const std::string& name);

struct OscillatorCost {
  double cost = 0.0;
  double final_qstar = 0.0;
  double max_qstar = 0.0;
  bool valid = true;
  /// Time at which validity failed (trap inversion or Omega^2 <= 0).
  std::optional<double> violation_time;
};

/// (1/tau) int (w/2) Q*_k coth(beta omega0 / 2) dt; w -> Omega for the local protocol.
/// The counterdiabatic protocol throws TrapInversionError; the local one reports validity.
OscillatorCost oscillator_cost(const FrequencySchedule& sched, OscProtocol protocol, double beta,
                               std::size_t steps = 0);

struct QstarSeries {
  std::vector<double> times;
  std::vector<double> bare, cd, lcd, ie;  // NaN where a protocol is invalid
};
QstarSeries qstar_series(const FrequencySchedule& sched, std::size_t steps = 0);

}  // namespace stacost
