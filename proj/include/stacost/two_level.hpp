#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace stacost {

using Complex = std::complex<double>;

/// H(t) = identity * 1 + (x sigma_x + y sigma_y + z sigma_z) / 2, hbar = 1.
struct PauliCoefficients {
  double identity = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Amplitudes in the sigma_z basis: alpha on |0>, beta on |1>.
struct QubitState {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};

  double norm() const { return std::sqrt(std::norm(alpha) + std::norm(beta)); }
};

inline const QubitState kZero{{1.0, 0.0}, {0.0, 0.0}};
inline const QubitState kOne{{0.0, 0.0}, {1.0, 0.0}};
QubitState plus_state();

struct SchedulePiece {
  double begin = 0.0;
  double end = 0.0;
  bool constant = false;
};

/// Time-dependent two-level Hamiltonian on [0, duration]. Cheap to copy.
class PauliSchedule {
 public:
  using Coefficients = std::function<PauliCoefficients(double)>;

  PauliSchedule(double duration, Coefficients coefficients,
                std::vector<SchedulePiece> pieces = {});

  static PauliSchedule constant(double duration, PauliCoefficients c);

  double duration() const { return duration_; }
  PauliCoefficients operator()(double t) const { return (*coefficients_)(t); }
  const std::vector<SchedulePiece>& pieces() const { return pieces_; }

 private:
  double duration_;
  std::shared_ptr<const Coefficients> coefficients_;
  std::vector<SchedulePiece> pieces_;
};

struct Eigensystem {
  QubitState ground;
  QubitState excited;
  double energy_minus = 0.0;
  double energy_plus = 0.0;
};

/// Eigenpairs of H(t); first nonzero component real-positive. Throws at degenerate points.
Eigensystem instantaneous_eigenstates(const PauliSchedule& schedule, double t);
Eigensystem eigensystem(const PauliCoefficients& c, double t = 0.0);

double fidelity(const QubitState& psi, const QubitState& phi);

/// Frobenius norm of H; the identity part only counts when include_identity is set.
double cost_rate(const PauliCoefficients& c, bool include_identity = false);
double cost_rate(const PauliSchedule& schedule, double t, bool include_identity = false);

/// (1/tau) int_0^tau ||H|| dt: composite Simpson on smooth pieces, exact on constant ones.
double integrated_cost(const PauliSchedule& schedule, std::size_t quadrature_steps = 10000,
                       bool include_identity = false);

struct QubitTrajectory {
  std::vector<double> times;
  std::vector<QubitState> states;
  std::vector<double> fidelity;  // to the reference's instantaneous ground state
  std::vector<double> cost_rate;

  const QubitState& final_state() const { return states.back(); }
};

struct PropagationOptions {
  std::size_t steps = 10000;
  bool record = true;
  bool include_identity = false;
  /// Hamiltonian whose adiabatic ground state defines the fidelity series; defaults to the
  /// propagated schedule.
  std::optional<PauliSchedule> reference;
};

/// Midpoint exponential stepping: exact 2x2 exponential of H at each substep midpoint.
/// Throws std::runtime_error naming the time stamp if a coefficient is not finite.
QubitTrajectory propagate(const PauliSchedule& schedule, const QubitState& psi0,
                          const PropagationOptions& options = {});

/// States on an increasing list of sample times starting at 0; the step budget is spread over
/// the intervals and constant pieces are stepped exactly.
QubitTrajectory sample_trajectory(const PauliSchedule& schedule, const QubitState& psi0,
                                  const std::vector<double>& times, std::size_t steps,
                                  const std::optional<PauliSchedule>& reference = std::nullopt);

/// Final state only, no recording.
QubitState propagate_final(const PauliSchedule& schedule, const QubitState& psi0,
                           std::size_t steps);

struct ConvergedRun {
  QubitState final_state;
  double final_fidelity = 0.0;
  std::size_t steps = 0;
  bool converged = false;
};

/// Doubles the step count until the final fidelity to target moves by less than tol.
ConvergedRun propagate_converged(const PauliSchedule& schedule, const QubitState& psi0,
                                 const QubitState& target, std::size_t initial_steps = 10000,
                                 double tol = 1e-10, int max_doublings = 8);

/// CSV with columns t, re_alpha, im_alpha, re_beta, im_beta, fidelity, cost_rate.
void write_trajectory_csv(std::ostream& out, const QubitTrajectory& traj, std::size_t stride = 1);

}  // namespace stacost
