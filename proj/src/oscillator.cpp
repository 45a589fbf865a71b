#include "stacost/oscillator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace stacost {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Grid nodes covering [0, duration] with every breakpoint on a node; even count per piece.
std::vector<double> make_grid(double duration, std::size_t steps,
                              const std::vector<double>& breakpoints) {
  std::vector<double> bounds{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < duration) bounds.push_back(b);
  bounds.push_back(duration);
  std::vector<double> grid{0.0};
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double len = bounds[k + 1] - bounds[k];
    auto n = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(static_cast<double>(steps) * len / duration)));
    if (n % 2) ++n;
    for (std::size_t i = 1; i <= n; ++i)
      grid.push_back(i == n ? bounds[k + 1] : bounds[k] + len * static_cast<double>(i) / n);
  }
  return grid;
}

template <std::size_t N, class Rhs>
std::vector<std::array<double, N>> rk4_on_grid(const std::vector<double>& grid, Rhs&& rhs,
                                               std::array<double, N> state, bool nudge) {
  std::vector<std::array<double, N>> out;
  out.reserve(grid.size());
  out.push_back(state);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i];
    const double b = grid[i + 1];
    const double h = b - a;
    const double eps = nudge ? 1e-12 * h : 0.0;
    auto at = [&](double t) { return std::clamp(t, a + eps, b - eps); };
    auto axpy = [](const std::array<double, N>& x, double s, const std::array<double, N>& k) {
      std::array<double, N> r;
      for (std::size_t j = 0; j < N; ++j) r[j] = x[j] + s * k[j];
      return r;
    };
    const auto k1 = rhs(at(a), state);
    const auto k2 = rhs(at(a + 0.5 * h), axpy(state, 0.5 * h, k1));
    const auto k3 = rhs(at(a + 0.5 * h), axpy(state, 0.5 * h, k2));
    const auto k4 = rhs(at(b), axpy(state, h, k3));
    for (std::size_t j = 0; j < N; ++j)
      state[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    out.push_back(state);
  }
  return out;
}

std::size_t default_steps(const FrequencySchedule& sched) {
  const double w = std::max(std::abs(sched.initial()), std::abs(sched.final_value()));
  // about 200 steps per radian of the fastest phase
  return std::max<std::size_t>(2000, static_cast<std::size_t>(std::ceil(sched.duration() * w * 200.0)));
}

// Simpson between consecutive piece bounds of the grid (breakpoints are nodes).
double grid_average(const std::vector<double>& grid, const std::vector<double>& f) {
  double total = 0.0;
  std::size_t start = 0;
  const std::size_t n = grid.size();
  for (std::size_t i = 1; i < n; ++i) {
    const bool piece_end =
        i + 1 == n || std::abs((grid[i + 1] - grid[i]) - (grid[i] - grid[i - 1])) >
                          1e-9 * (grid[i] - grid[i - 1]);
    if (!piece_end) continue;
    const std::size_t m = i - start;
    if (m % 2 == 0) {
      const double h = (grid[i] - grid[start]) / static_cast<double>(m);
      double sum = f[start] + f[i];
      for (std::size_t k = 1; k < m; ++k) sum += (k % 2 ? 4.0 : 2.0) * f[start + k];
      total += sum * h / 3.0;
    } else {
      for (std::size_t k = start; k < i; ++k)
        total += 0.5 * (grid[k + 1] - grid[k]) * (f[k] + f[k + 1]);
    }
    start = i;
  }
  return total / (grid.back() - grid.front());
}

void require_positive(double omega, double t) {
  if (!(omega > 0.0)) {
    std::ostringstream msg;
    msg << "trap frequency must be positive (omega = " << omega << " at t = " << t << ")";
    throw std::domain_error(msg.str());
  }
}

}  // namespace

FrequencySchedule::FrequencySchedule(double initial, double final_value, double duration,
                                     Sampler sampler, std::vector<double> breakpoints)
    : initial_(initial),
      final_(final_value),
      duration_(duration),
      sampler_(std::move(sampler)),
      breakpoints_(std::move(breakpoints)) {
  if (!(duration > 0.0)) throw std::invalid_argument("frequency schedule duration must be positive");
  if (!(initial > 0.0) || !(final_value > 0.0))
    throw std::invalid_argument("trap frequencies must be positive");
}

FrequencySchedule FrequencySchedule::quintic(double omega0, double omega1, double duration) {
  const double d = omega1 - omega0;
  return FrequencySchedule(omega0, omega1, duration, [=](double t) {
    const double s = t / duration;
    const double s2 = s * s;
    return FrequencySample{omega0 + d * s2 * s * (10.0 - 15.0 * s + 6.0 * s2),
                           d * 30.0 * s2 * (1.0 - s) * (1.0 - s) / duration,
                           d * (60.0 * s - 180.0 * s2 + 120.0 * s2 * s) / (duration * duration)};
  });
}

FrequencySchedule FrequencySchedule::constant(double omega, double duration) {
  return FrequencySchedule(omega, omega, duration,
                           [omega](double) { return FrequencySample{omega, 0.0, 0.0}; });
}

FrequencySchedule FrequencySchedule::quench(double omega0, double omega1, double quench_time,
                                            double duration) {
  return FrequencySchedule(
      omega0, omega1, duration,
      [=](double t) { return FrequencySample{t < quench_time ? omega0 : omega1, 0.0, 0.0}; },
      {quench_time});
}

double OscillatorSolution::max_wronskian_drift() const {
  double drift = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) drift = std::max(drift, std::abs(wronskian(i) + 1.0));
  return drift;
}

OscillatorSolution classical_solutions(const std::function<double(double)>& squared_frequency,
                                       double duration, std::size_t steps,
                                       const std::vector<double>& breakpoints) {
  if (steps < 2) throw std::invalid_argument("classical_solutions: need at least 2 steps");
  for (int attempt = 0;; ++attempt) {
    OscillatorSolution sol;
    sol.times = make_grid(duration, steps, breakpoints);
    const auto states = rk4_on_grid<4>(
        sol.times,
        [&](double t, const std::array<double, 4>& s) {
          const double w2 = squared_frequency(t);
          return std::array<double, 4>{s[1], -w2 * s[0], s[3], -w2 * s[2]};
        },
        {0.0, 1.0, 1.0, 0.0}, !breakpoints.empty());
    for (const auto& s : states) {
      sol.x.push_back(s[0]);
      sol.x_dot.push_back(s[1]);
      sol.y.push_back(s[2]);
      sol.y_dot.push_back(s[3]);
    }
    const double drift = sol.max_wronskian_drift();
    if (drift < 1e-9) return sol;
    if (attempt >= 4) {
      if (drift < 1e-6) return sol;
      std::ostringstream msg;
      msg << "classical_solutions: Wronskian drift " << drift << " after refinement";
      throw std::runtime_error(msg.str());
    }
    steps *= 2;
  }
}

OscillatorSolution classical_solutions(const FrequencySchedule& sched, std::size_t steps) {
  if (steps == 0) steps = default_steps(sched);
  return classical_solutions(
      [&](double t) {
        const double w = sched(t).omega;
        return w * w;
      },
      sched.duration(), steps, sched.breakpoints());
}

void ermakov_solve(const FrequencySchedule& sched, OscillatorSolution& sol) {
  const double w0 = sched.initial();
  const auto states = rk4_on_grid<2>(
      sol.times,
      [&](double t, const std::array<double, 2>& s) {
        const double w = sched(t).omega;
        const double b3 = s[0] * s[0] * s[0];
        return std::array<double, 2>{s[1], w0 * w0 / b3 - w * w * s[0]};
      },
      {1.0, 0.0}, !sched.breakpoints().empty());
  sol.b.clear();
  sol.b_dot.clear();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!(states[i][0] > 0.0)) {
      std::ostringstream msg;
      msg << "ermakov_solve: scale factor b <= 0 at t = " << sol.times[i];
      throw std::runtime_error(msg.str());
    }
    sol.b.push_back(states[i][0]);
    sol.b_dot.push_back(states[i][1]);
  }
}

OscillatorSolution ermakov_solve(const FrequencySchedule& sched, std::size_t steps) {
  OscillatorSolution sol = classical_solutions(sched, steps);
  ermakov_solve(sched, sol);
  return sol;
}

double husimi_qstar(double omega0, double omega, const OscillatorSolution& sol, std::size_t i) {
  require_positive(omega, sol.times.at(i));
  const double w2 = omega * omega;
  return (omega0 * omega0 * (w2 * sol.x[i] * sol.x[i] + sol.x_dot[i] * sol.x_dot[i]) +
          (w2 * sol.y[i] * sol.y[i] + sol.y_dot[i] * sol.y_dot[i])) /
         (2.0 * omega0 * omega);
}

double husimi_qstar(const FrequencySchedule& sched, const OscillatorSolution& sol, std::size_t i) {
  return husimi_qstar(sched.initial(), sched(sol.times.at(i)).omega, sol, i);
}

double qstar_cd(const FrequencySchedule& sched, double t) {
  const FrequencySample w = sched(t);
  require_positive(w.omega, t);
  const double ratio = w.omega_dot * w.omega_dot / (4.0 * std::pow(w.omega, 4));
  if (!(ratio < 1.0)) {
    std::ostringstream msg;
    msg << "counterdiabatic trap inversion at t = " << t;
    throw TrapInversionError(msg.str(), t);
  }
  return 1.0 / std::sqrt(1.0 - ratio);
}

double lcd_squared_frequency(const FrequencySchedule& sched, double t) {
  const FrequencySample w = sched(t);
  require_positive(w.omega, t);
  return w.omega * w.omega - 3.0 * w.omega_dot * w.omega_dot / (4.0 * w.omega * w.omega) +
         w.omega_ddot / (2.0 * w.omega);
}

double qstar_ie(const FrequencySchedule& sched, double t) {
  const FrequencySample w = sched(t);
  require_positive(w.omega, t);
  return 1.0 + w.omega_dot * w.omega_dot / (8.0 * std::pow(w.omega, 4));
}

double ie_energy(const FrequencySchedule& sched, const OscillatorSolution& sol, std::size_t i,
                 double beta) {
  const double w0 = sched.initial();
  const double w = sched(sol.times.at(i)).omega;
  const double b = sol.b.at(i);
  const double bd = sol.b_dot.at(i);
  return 0.5 * (bd * bd / (2.0 * w0) + w * w * b * b / (2.0 * w0) + w0 / (2.0 * b * b)) /
         std::tanh(beta * w0 / 2.0);
}

std::optional<double> cd_violation_time(const FrequencySchedule& sched, std::size_t samples) {
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = sched.duration() * static_cast<double>(i) / static_cast<double>(samples);
    const FrequencySample w = sched(t);
    if (!(w.omega > 0.0) || std::abs(w.omega_dot) >= 2.0 * w.omega * w.omega) return t;
  }
  return std::nullopt;
}

double cd_min_valid_duration(double omega0, double omega1, double tol) {
  auto valid = [&](double tau) {
    return !cd_violation_time(FrequencySchedule::quintic(omega0, omega1, tau)).has_value();
  };
  double hi = 1.0;
  while (!valid(hi)) hi *= 2.0;
  double lo = hi / 2.0;
  while (valid(lo) && lo > 1e-9) lo /= 2.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (valid(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::string to_string(OscProtocol p) {
  switch (p) {
    case OscProtocol::bare: return "bare";
    case OscProtocol::cd: return "cd";
    case OscProtocol::lcd: return "lcd";
    case OscProtocol::ie: return "ie";
  }
  return "unknown";
}

OscProtocol osc_protocol_from_string(const std::string& name) {
  for (auto p : {OscProtocol::bare, OscProtocol::cd, OscProtocol::lcd, OscProtocol::ie})
    if (to_string(p) == name) return p;
  throw std::invalid_argument("unknown oscillator protocol '" + name + "'");
}

namespace {

// Q* and effective frequency on the grid for one protocol; returns false if invalid.
bool protocol_series(const FrequencySchedule& sched, OscProtocol protocol, std::size_t steps,
                     std::vector<double>& grid, std::vector<double>& qstar,
                     std::vector<double>& freq, std::optional<double>& violation) {
  const double w0 = sched.initial();
  if (steps == 0) steps = default_steps(sched);
  qstar.clear();
  freq.clear();
  switch (protocol) {
    case OscProtocol::bare: {
      const OscillatorSolution sol = classical_solutions(sched, steps);
      grid = sol.times;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        freq.push_back(sched(grid[i]).omega);
        qstar.push_back(husimi_qstar(w0, freq.back(), sol, i));
      }
      return true;
    }
    case OscProtocol::cd:
    case OscProtocol::ie: {
      grid = make_grid(sched.duration(), steps, sched.breakpoints());
      for (double t : grid) {
        freq.push_back(sched(t).omega);
        qstar.push_back(protocol == OscProtocol::cd ? qstar_cd(sched, t) : qstar_ie(sched, t));
      }
      return true;
    }
    case OscProtocol::lcd: {
      grid = make_grid(sched.duration(), steps, sched.breakpoints());
      for (double t : grid) {
        if (!(lcd_squared_frequency(sched, t) > 0.0)) {
          violation = t;
          return false;
        }
      }
      const OscillatorSolution sol = classical_solutions(
          [&](double t) { return lcd_squared_frequency(sched, t); }, sched.duration(), steps,
          sched.breakpoints());
      grid = sol.times;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        freq.push_back(std::sqrt(lcd_squared_frequency(sched, grid[i])));
        qstar.push_back(husimi_qstar(w0, freq.back(), sol, i));
      }
      return true;
    }
  }
  return false;
}

}  // namespace

OscillatorCost oscillator_cost(const FrequencySchedule& sched, OscProtocol protocol, double beta,
                               std::size_t steps) {
  OscillatorCost out;
  std::vector<double> grid, qstar, freq;
  if (protocol == OscProtocol::cd) {
    if (auto t = cd_violation_time(sched)) {
      std::ostringstream msg;
      msg << "counterdiabatic trap inversion at t = " << *t;
      throw TrapInversionError(msg.str(), *t);
    }
  }
  if (!protocol_series(sched, protocol, steps, grid, qstar, freq, out.violation_time)) {
    out.valid = false;
    out.cost = kNaN;
    out.final_qstar = kNaN;
    out.max_qstar = kNaN;
    return out;
  }
  std::vector<double> energy(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) energy[i] = freq[i] * qstar[i];
  out.cost = 0.5 / std::tanh(beta * sched.initial() / 2.0) * grid_average(grid, energy);
  out.final_qstar = qstar.back();
  out.max_qstar = *std::max_element(qstar.begin(), qstar.end());
  return out;
}

QstarSeries qstar_series(const FrequencySchedule& sched, std::size_t steps) {
  if (steps == 0) steps = default_steps(sched);
  QstarSeries out;
  out.times = make_grid(sched.duration(), steps, sched.breakpoints());
  const std::size_t n = out.times.size();
  std::vector<double> grid, q, f;
  std::optional<double> violation;

  // the classical integrators may refine; resample onto the common grid by stride
  auto resample = [&](const std::vector<double>& g, const std::vector<double>& v) {
    std::vector<double> r(n, kNaN);
    if (g.size() == n) return v;
    const std::size_t stride = (g.size() - 1) / (n - 1);
    for (std::size_t i = 0; i < n; ++i) r[i] = v[i * stride];
    return r;
  };

  protocol_series(sched, OscProtocol::bare, steps, grid, q, f, violation);
  out.bare = resample(grid, q);
  out.ie.resize(n);
  out.cd.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.ie[i] = qstar_ie(sched, out.times[i]);
    try {
      out.cd[i] = qstar_cd(sched, out.times[i]);
    } catch (const TrapInversionError&) {
      out.cd[i] = kNaN;
    }
  }
  if (protocol_series(sched, OscProtocol::lcd, steps, grid, q, f, violation))
    out.lcd = resample(grid, q);
  else
    out.lcd.assign(n, kNaN);
  return out;
}

}  // namespace stacost
