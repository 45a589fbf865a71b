#include "stacost/landau_zener.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stacost/nelder_mead.hpp"
#include "stacost/parallel.hpp"

namespace stacost {

namespace {

std::vector<SchedulePiece> pieces_of(const Ramp& ramp) {
  std::vector<SchedulePiece> out;
  for (const auto& p : ramp.pieces()) out.push_back({p.begin, p.end, p.constant});
  return out;
}

template <class F>
double simpson(F&& f, double a, double b, std::size_t n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
  return sum * h / 3.0;
}

}  // namespace

std::string to_string(LzProtocol p) {
  switch (p) {
    case LzProtocol::bare: return "bare";
    case LzProtocol::cd: return "cd";
    case LzProtocol::lcd: return "lcd";
    case LzProtocol::bob: return "bob";
    case LzProtocol::oc: return "oc";
  }
  return "unknown";
}

LzProtocol lz_protocol_from_string(const std::string& name) {
  for (auto p : {LzProtocol::bare, LzProtocol::cd, LzProtocol::lcd, LzProtocol::bob, LzProtocol::oc})
    if (to_string(p) == name) return p;
  throw std::invalid_argument("unknown Landau-Zener protocol '" + name + "'");
}

void LzConfig::validate() const {
  if (!(gap > 0.0)) throw std::invalid_argument("LzConfig: gap must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("LzConfig: duration must be positive");
}

QubitState LzConfig::initial_state() const { return lz_ground_state(gap, g0); }
QubitState LzConfig::target_state() const { return lz_ground_state(gap, g1); }

QubitState lz_ground_state(double gap, double g) {
  return eigensystem({0.0, gap, 0.0, g}).ground;
}

double lz_theta_rate(double gap, const RampSample& g) {
  return -g.deriv1 * gap / (gap * gap + g.value * g.value);
}

PauliCoefficients lz_lcd_coefficients(double gap, const RampSample& g) {
  const double d2 = gap * gap + g.value * g.value;
  const double theta_dot = lz_theta_rate(gap, g);
  const double theta_ddot =
      -gap * (g.deriv2 * d2 - 2.0 * g.value * g.deriv1 * g.deriv1) / (d2 * d2);
  const double eta_dot = theta_ddot * gap / (gap * gap + theta_dot * theta_dot);
  return {0.0, std::sqrt(gap * gap + theta_dot * theta_dot), 0.0, g.value - eta_dot};
}

PauliSchedule lz_bare(double gap, const Ramp& ramp) {
  return PauliSchedule(
      ramp.duration(), [gap, ramp](double t) { return PauliCoefficients{0.0, gap, 0.0, ramp.value(t)}; },
      pieces_of(ramp));
}

PauliSchedule lz_cd(double gap, const Ramp& ramp) {
  return PauliSchedule(
      ramp.duration(),
      [gap, ramp](double t) {
        const RampSample g = ramp.sample(t);
        return PauliCoefficients{0.0, gap, lz_theta_rate(gap, g), g.value};
      },
      pieces_of(ramp));
}

PauliSchedule lz_lcd(double gap, const Ramp& ramp) {
  return PauliSchedule(
      ramp.duration(), [gap, ramp](double t) { return lz_lcd_coefficients(gap, ramp.sample(t)); },
      pieces_of(ramp));
}

PauliSchedule lz_schedule(LzProtocol protocol, double gap, const Ramp& ramp) {
  switch (protocol) {
    case LzProtocol::cd: return lz_cd(gap, ramp);
    case LzProtocol::lcd: return lz_lcd(gap, ramp);
    case LzProtocol::bare:
    case LzProtocol::bob:
    case LzProtocol::oc: return lz_bare(gap, ramp);
  }
  throw std::invalid_argument("lz_schedule: unknown protocol");
}

std::optional<std::string> lcd_ramp_warning(const Ramp& ramp) {
  if (ramp.has_flat_endpoints(1e-9)) return std::nullopt;
  return "ramp kind '" + to_string(ramp.kind()) +
         "' lacks flat endpoints; the local counterdiabatic schedule will not coincide with the "
         "bare Hamiltonian at t = 0 and t = tau";
}

double qsl_time(double gap, const QubitState& initial, const QubitState& target) {
  double arg = std::abs(initial.alpha * target.alpha) + std::abs(initial.beta * target.beta);
  if (arg > 1.0 + 1e-12 || arg < -1e-12)
    throw std::domain_error("qsl_time: overlap bound outside [0, 1]; states not normalized?");
  arg = std::clamp(arg, 0.0, 1.0);
  return 2.0 / gap * std::acos(arg);
}

double qsl_time(const LzConfig& cfg) {
  return qsl_time(cfg.gap, cfg.initial_state(), cfg.target_state());
}

BobKicks optimize_bob_kicks(const LzConfig& cfg, double amplitude, int grid) {
  cfg.validate();
  if (grid < 2) throw std::invalid_argument("optimize_bob_kicks: grid must be >= 2");
  const double tau = qsl_time(cfg);
  const QubitState psi0 = cfg.initial_state();
  const QubitState target = cfg.target_state();
  const double two_pi = 2.0 * std::numbers::pi;
  const double max_angle = 0.5 * tau * amplitude;

  auto infidelity = [&](double phi1, double phi2) {
    phi1 = std::fmod(std::fmod(phi1, two_pi) + two_pi, two_pi);
    phi2 = std::fmod(std::fmod(phi2, two_pi) + two_pi, two_pi);
    if (phi1 >= max_angle || phi2 >= max_angle) return 1.0;
    const Ramp ramp = bob_pulse(amplitude, tau, phi1, phi2);
    return 1.0 - fidelity(target, propagate_final(lz_bare(cfg.gap, ramp), psi0, 2));
  };

  double best_q = 2.0;
  double best1 = 0.0;
  double best2 = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double p1 = two_pi * i / grid;
      const double p2 = two_pi * j / grid;
      const double q = infidelity(p1, p2);
      if (q < best_q) {
        best_q = q;
        best1 = p1;
        best2 = p2;
      }
    }
  }

  NelderMeadOptions opts;
  opts.max_evaluations = 400;
  opts.f_tolerance = 1e-15;
  opts.x_tolerance = 1e-12;
  const double step = two_pi / grid / 2.0;
  const auto refined = nelder_mead(
      [&](std::span<const double> x) { return infidelity(x[0], x[1]); }, {best1, best2},
      {step, step}, opts);

  BobKicks out;
  out.duration = tau;
  out.amplitude = amplitude;
  out.phi1 = std::fmod(std::fmod(refined.x[0], two_pi) + two_pi, two_pi);
  out.phi2 = std::fmod(std::fmod(refined.x[1], two_pi) + two_pi, two_pi);
  out.fidelity = 1.0 - std::min(refined.value, best_q);
  if (refined.value > best_q) {
    out.phi1 = best1;
    out.phi2 = best2;
  }
  out.success = out.fidelity >= 0.999;
  return out;
}

double bob_kick_cost(double gap, const Ramp& bob) {
  const auto* p = std::get_if<BobPulse>(&bob.shape());
  if (!p) throw std::invalid_argument("bob_kick_cost: ramp is not a bang-off-bang pulse");
  const double rate = std::sqrt((gap * gap + p->amplitude * p->amplitude) / 2.0);
  return rate * (p->phi1 + p->phi2) / p->amplitude / bob.duration();
}

std::vector<DecompositionPoint> cd_cost_decomposition(double gap, const Ramp& ramp,
                                                      const std::vector<double>& s_grid) {
  std::vector<DecompositionPoint> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) {
    const RampSample g = ramp.sample_scaled(s);
    const Eigensystem es = eigensystem({0.0, gap, 0.0, g.value}, s * ramp.duration());
    // <-| dH/ds |+> with dH/ds = g_s sigma_z / 2
    const Complex element =
        0.5 * g.deriv1 *
        (std::conj(es.ground.alpha) * es.excited.alpha - std::conj(es.ground.beta) * es.excited.beta);
    const double split = es.energy_plus - es.energy_minus;
    DecompositionPoint pt;
    pt.s = s;
    pt.energy_sq_sum = es.energy_minus * es.energy_minus + es.energy_plus * es.energy_plus;
    pt.coupling_sq_sum = 2.0 * std::norm(element) / (split * split);
    out.push_back(pt);
  }
  return out;
}

double decomposition_cost(double gap, const Ramp& ramp, std::size_t quadrature_steps) {
  const double tau = ramp.duration();
  return simpson(
      [&](double s) {
        const auto pt = cd_cost_decomposition(gap, ramp, {s}).front();
        return std::sqrt(pt.energy_sq_sum + pt.coupling_sq_sum / (tau * tau));
      },
      0.0, 1.0, quadrature_steps);
}

double adiabatic_cost(double gap, const Ramp& ramp, std::size_t quadrature_steps) {
  return simpson(
      [&](double s) {
        const double g = ramp.sample_scaled(s).value;
        return std::sqrt((gap * gap + g * g) / 2.0);
      },
      0.0, 1.0, quadrature_steps);
}

LzRun run_lz(LzProtocol protocol, const LzConfig& cfg, const Ramp& ramp, std::size_t steps) {
  cfg.validate();
  const PauliSchedule schedule = lz_schedule(protocol, cfg.gap, ramp);
  const ConvergedRun run =
      propagate_converged(schedule, cfg.initial_state(), cfg.target_state(), steps);
  return {run.final_fidelity, integrated_cost(schedule, std::max<std::size_t>(steps, 20000)),
          run.steps};
}

CostTable cost_scan(double gap, const std::vector<double>& durations,
                    const std::vector<ScanSeries>& series, int threads,
                    std::size_t quadrature_steps) {
  CostTable table;
  for (const auto& s : series) table.columns.push_back(s.name);
  table.durations = durations;
  table.costs.assign(durations.size(), std::vector<double>(series.size(), 0.0));
  const std::size_t cells = durations.size() * series.size();
  parallel_for(cells, threads, [&](std::size_t cell) {
    const std::size_t row = cell / series.size();
    const std::size_t col = cell % series.size();
    const double tau = durations[row];
    if (!(tau > 0.0)) throw std::invalid_argument("cost_scan: durations must be positive");
    const Ramp ramp = series[col].ramp(tau);
    table.costs[row][col] =
        integrated_cost(lz_schedule(series[col].protocol, gap, ramp), quadrature_steps);
  });
  return table;
}

std::optional<double> locate_crossover(const std::function<double(double)>& diff,
                                       const std::vector<double>& grid, double tol) {
  if (grid.size() < 2) return std::nullopt;
  double lo = grid.front();
  double f_lo = diff(lo);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double hi = grid[i];
    const double f_hi = diff(hi);
    if ((f_lo < 0.0) != (f_hi < 0.0)) {
      double a = lo;
      double b = hi;
      double fa = f_lo;
      while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = diff(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    f_lo = f_hi;
  }
  return std::nullopt;
}

std::optional<double> cd_lcd_crossover(const LzConfig& cfg, const std::vector<double>& grid,
                                       double tol) {
  cfg.validate();
  return locate_crossover(
      [&](double tau) {
        LzConfig c = cfg;
        c.duration = tau;
        const Ramp ramp = c.quintic_ramp();
        return integrated_cost(lz_cd(cfg.gap, ramp), 20000) -
               integrated_cost(lz_lcd(cfg.gap, ramp), 20000);
      },
      grid, tol);
}

}  // namespace stacost
