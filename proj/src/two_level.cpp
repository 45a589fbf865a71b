#include "stacost/two_level.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stacost {

namespace {

void check_finite(const PauliCoefficients& c, double t) {
  if (!std::isfinite(c.identity) || !std::isfinite(c.x) || !std::isfinite(c.y) ||
      !std::isfinite(c.z)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "non-finite Hamiltonian coefficient at t = " << t;
    throw std::runtime_error(msg.str());
  }
}

// exp(-i H dt) applied to psi
QubitState apply_step(const PauliCoefficients& c, double dt, const QubitState& psi) {
  const double n = std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z);
  const double angle = 0.5 * n * dt;
  const double cs = std::cos(angle);
  const double sn = n > 0.0 ? std::sin(angle) / n : 0.5 * dt;
  // (n . sigma) psi
  const Complex nxy_minus(c.x, -c.y);
  const Complex nxy_plus(c.x, c.y);
  const Complex sa = c.z * psi.alpha + nxy_minus * psi.beta;
  const Complex sb = nxy_plus * psi.alpha - c.z * psi.beta;
  const Complex minus_i_sn(0.0, -sn);
  const Complex global = std::polar(1.0, -c.identity * dt);
  return {global * (cs * psi.alpha + minus_i_sn * sa), global * (cs * psi.beta + minus_i_sn * sb)};
}

// Unit eigenvector of (n . sigma) with eigenvalue sign * |n|.
QubitState eigenvector(const PauliCoefficients& c, double norm, double sign) {
  const double lambda = sign * norm;
  // rows of (n.sigma - lambda): (z - lambda, x - iy), (x + iy, -z - lambda)
  Complex a, b;
  const double r1 = std::abs(c.z - lambda) + std::hypot(c.x, c.y);
  const double r2 = std::abs(-c.z - lambda) + std::hypot(c.x, c.y);
  if (r1 >= r2) {
    a = Complex(c.x, -c.y);
    b = Complex(lambda - c.z, 0.0);
  } else {
    a = Complex(lambda + c.z, 0.0);
    b = Complex(c.x, c.y);
  }
  const double nrm = std::sqrt(std::norm(a) + std::norm(b));
  a /= nrm;
  b /= nrm;
  // first nonzero component real-positive
  const Complex lead = std::abs(a) > 1e-15 ? a : b;
  const Complex phase = std::conj(lead) / std::abs(lead);
  return {a * phase, b * phase};
}

std::vector<std::size_t> distribute_steps(const PauliSchedule& schedule, std::size_t steps) {
  const auto& pieces = schedule.pieces();
  double smooth_length = 0.0;
  for (const auto& p : pieces)
    if (!p.constant) smooth_length += p.end - p.begin;
  std::vector<std::size_t> out;
  out.reserve(pieces.size());
  for (const auto& p : pieces) {
    if (p.constant) {
      out.push_back(1);
    } else {
      const double share = smooth_length > 0.0 ? (p.end - p.begin) / smooth_length : 1.0;
      out.push_back(std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(share * steps))));
    }
  }
  return out;
}

}  // namespace

QubitState plus_state() {
  const double h = std::numbers::sqrt2 / 2.0;
  return {{h, 0.0}, {h, 0.0}};
}

PauliSchedule::PauliSchedule(double duration, Coefficients coefficients,
                             std::vector<SchedulePiece> pieces)
    : duration_(duration),
      coefficients_(std::make_shared<const Coefficients>(std::move(coefficients))),
      pieces_(std::move(pieces)) {
  if (!(duration > 0.0)) throw std::invalid_argument("schedule duration must be positive");
  if (pieces_.empty()) pieces_.push_back({0.0, duration, false});
}

PauliSchedule PauliSchedule::constant(double duration, PauliCoefficients c) {
  return PauliSchedule(duration, [c](double) { return c; }, {{0.0, duration, true}});
}

Eigensystem eigensystem(const PauliCoefficients& c, double t) {
  const double n = std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z);
  if (!(n > 1e-14)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "degenerate spectrum at t = " << t;
    throw std::domain_error(msg.str());
  }
  return {eigenvector(c, n, -1.0), eigenvector(c, n, +1.0), c.identity - 0.5 * n,
          c.identity + 0.5 * n};
}

Eigensystem instantaneous_eigenstates(const PauliSchedule& schedule, double t) {
  return eigensystem(schedule(t), t);
}

double fidelity(const QubitState& psi, const QubitState& phi) {
  return std::norm(std::conj(psi.alpha) * phi.alpha + std::conj(psi.beta) * phi.beta);
}

double cost_rate(const PauliCoefficients& c, bool include_identity) {
  const double id = include_identity ? 2.0 * c.identity * c.identity : 0.0;
  return std::sqrt(id + 0.5 * (c.x * c.x + c.y * c.y + c.z * c.z));
}

double cost_rate(const PauliSchedule& schedule, double t, bool include_identity) {
  return cost_rate(schedule(t), include_identity);
}

double integrated_cost(const PauliSchedule& schedule, std::size_t quadrature_steps,
                       bool include_identity) {
  if (quadrature_steps < 16) throw std::invalid_argument("integrated_cost: need >= 16 steps");
  const auto counts = distribute_steps(schedule, quadrature_steps);
  const auto& pieces = schedule.pieces();
  double total = 0.0;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& p = pieces[k];
    const double len = p.end - p.begin;
    if (len <= 0.0) continue;
    if (p.constant) {
      total += len * cost_rate(schedule(0.5 * (p.begin + p.end)), include_identity);
      continue;
    }
    std::size_t n = std::max<std::size_t>(counts[k], 16);
    if (n % 2) ++n;
    const double h = len / static_cast<double>(n);
    double sum = cost_rate(schedule(p.begin), include_identity) +
                 cost_rate(schedule(p.end), include_identity);
    for (std::size_t i = 1; i < n; ++i)
      sum += (i % 2 ? 4.0 : 2.0) * cost_rate(schedule(p.begin + h * i), include_identity);
    total += sum * h / 3.0;
  }
  return total / schedule.duration();
}

QubitTrajectory propagate(const PauliSchedule& schedule, const QubitState& psi0,
                          const PropagationOptions& options) {
  if (options.steps < 2) throw std::invalid_argument("propagate: need at least 2 steps");
  const PauliSchedule& reference = options.reference ? *options.reference : schedule;
  QubitTrajectory traj;
  auto record = [&](double t, const QubitState& psi) {
    traj.times.push_back(t);
    traj.states.push_back(psi);
    double f = std::numeric_limits<double>::quiet_NaN();
    try {
      f = fidelity(instantaneous_eigenstates(reference, t).ground, psi);
    } catch (const std::domain_error&) {
    }
    traj.fidelity.push_back(f);
    traj.cost_rate.push_back(cost_rate(schedule, t, options.include_identity));
  };

  QubitState psi = psi0;
  if (options.record) record(0.0, psi);
  const auto counts = distribute_steps(schedule, options.steps);
  const auto& pieces = schedule.pieces();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& p = pieces[k];
    const double len = p.end - p.begin;
    if (len <= 0.0) continue;
    const std::size_t n = counts[k];
    const double h = len / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double mid = p.begin + h * (static_cast<double>(i) + 0.5);
      const PauliCoefficients c = schedule(mid);
      check_finite(c, mid);
      psi = apply_step(c, h, psi);
      if (options.record) {
        // a constant piece is one exact step; evaluate the record inside it
        const double t = i + 1 == n ? p.end : p.begin + h * static_cast<double>(i + 1);
        record(t, psi);
      }
    }
  }
  if (!options.record) {
    traj.times.push_back(schedule.duration());
    traj.states.push_back(psi);
  }
  return traj;
}

QubitTrajectory sample_trajectory(const PauliSchedule& schedule, const QubitState& psi0,
                                  const std::vector<double>& times, std::size_t steps,
                                  const std::optional<PauliSchedule>& reference) {
  if (times.empty() || times.front() != 0.0)
    throw std::invalid_argument("sample_trajectory: times must start at 0");
  const PauliSchedule& ref = reference ? *reference : schedule;
  const double tau = schedule.duration();
  QubitTrajectory traj;
  QubitState psi = psi0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(psi);
    double f = std::numeric_limits<double>::quiet_NaN();
    try {
      f = fidelity(instantaneous_eigenstates(ref, t).ground, psi);
    } catch (const std::domain_error&) {
    }
    traj.fidelity.push_back(f);
    traj.cost_rate.push_back(cost_rate(schedule, t));
  };
  record(0.0);
  const auto& pieces = schedule.pieces();
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double a = times[i - 1];
    const double b = times[i];
    if (!(b > a) || b > tau * (1.0 + 1e-12))
      throw std::invalid_argument("sample_trajectory: times must increase within [0, duration]");
    for (const auto& p : pieces) {
      const double lo = std::max(a, p.begin);
      const double hi = std::min(b, p.end);
      if (!(hi > lo)) continue;
      std::size_t n = 1;
      if (!p.constant)
        n = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(static_cast<double>(steps) * (hi - lo) / tau)));
      const double h = (hi - lo) / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double mid = lo + h * (static_cast<double>(k) + 0.5);
        const PauliCoefficients c = schedule(mid);
        check_finite(c, mid);
        psi = apply_step(c, h, psi);
      }
    }
    record(b);
  }
  return traj;
}

QubitState propagate_final(const PauliSchedule& schedule, const QubitState& psi0,
                           std::size_t steps) {
  PropagationOptions opts;
  opts.steps = steps;
  opts.record = false;
  return propagate(schedule, psi0, opts).final_state();
}

ConvergedRun propagate_converged(const PauliSchedule& schedule, const QubitState& psi0,
                                 const QubitState& target, std::size_t initial_steps, double tol,
                                 int max_doublings) {
  ConvergedRun run;
  run.steps = initial_steps;
  run.final_state = propagate_final(schedule, psi0, run.steps);
  run.final_fidelity = fidelity(target, run.final_state);
  for (int i = 0; i < max_doublings; ++i) {
    const std::size_t steps = run.steps * 2;
    const QubitState psi = propagate_final(schedule, psi0, steps);
    const double f = fidelity(target, psi);
    const double change = std::abs(f - run.final_fidelity);
    run.steps = steps;
    run.final_state = psi;
    run.final_fidelity = f;
    if (change < tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

void write_trajectory_csv(std::ostream& out, const QubitTrajectory& traj, std::size_t stride) {
  stride = std::max<std::size_t>(stride, 1);
  out << "t,re_alpha,im_alpha,re_beta,im_beta,fidelity,cost_rate\n";
  const auto old_precision = out.precision(15);
  const std::size_t n = traj.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % stride != 0 && i + 1 != n) continue;
    const auto& s = traj.states[i];
    out << traj.times[i] << ',' << s.alpha.real() << ',' << s.alpha.imag() << ','
        << s.beta.real() << ',' << s.beta.imag() << ',' << traj.fidelity[i] << ','
        << traj.cost_rate[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace stacost
