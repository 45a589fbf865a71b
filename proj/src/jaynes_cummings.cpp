#include "stacost/jaynes_cummings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stacost/parallel.hpp"

namespace stacost {

namespace {

std::size_t quadrature_steps_for(const JcConfig&) { return 20000; }

}  // namespace

std::string to_string(JcProtocol p) {
  switch (p) {
    case JcProtocol::bare: return "bare";
    case JcProtocol::cd: return "cd";
    case JcProtocol::lcd: return "lcd";
  }
  return "unknown";
}

JcProtocol jc_protocol_from_string(const std::string& name) {
  for (auto p : {JcProtocol::bare, JcProtocol::cd, JcProtocol::lcd})
    if (to_string(p) == name) return p;
  throw std::invalid_argument("unknown Jaynes-Cummings protocol '" + name + "'");
}

void JcConfig::validate() const {
  if (cutoff < 0) throw std::invalid_argument("JcConfig: cutoff must be >= 0");
  if (detuning == 0.0) throw std::invalid_argument("JcConfig: detuning must be non-zero");
  if (!(duration > 0.0)) throw std::invalid_argument("JcConfig: duration must be positive");
}

double rabi_frequency(double g, int n) { return 2.0 * g * std::sqrt(n + 1.0); }

double jc_cd_coefficient(double detuning, const RampSample& g, int n) {
  const double np1 = n + 1.0;
  return g.deriv1 * std::sqrt(np1) * detuning /
         (detuning * detuning + 4.0 * np1 * g.value * g.value);
}

double mixing_angle_rate(double detuning, const RampSample& g, int n) {
  const double ratio = rabi_frequency(g.value, n) / detuning;
  const double ratio_dot = rabi_frequency(g.deriv1, n) / detuning;
  return 0.5 * ratio_dot / (1.0 + ratio * ratio);
}

JcBlock jc_block(const JcConfig& cfg, const Ramp& ramp, int n) {
  if (n < 0) throw std::invalid_argument("jc_block: photon number must be >= 0");
  const double shift = (2.0 * n + 1.0) * cfg.cavity / 2.0;
  const double delta = cfg.detuning;
  return {n,
          PauliSchedule(ramp.duration(),
                        [=](double t) {
                          return PauliCoefficients{shift, delta, 0.0,
                                                   -rabi_frequency(ramp.value(t), n)};
                        }),
          shift};
}

JcBlock jc_cd_block(const JcConfig& cfg, const Ramp& ramp, int n) {
  if (n < 0) throw std::invalid_argument("jc_cd_block: photon number must be >= 0");
  const double shift = (2.0 * n + 1.0) * cfg.cavity / 2.0;
  const double delta = cfg.detuning;
  return {n,
          PauliSchedule(ramp.duration(),
                        [=](double t) {
                          const RampSample g = ramp.sample(t);
                          return PauliCoefficients{shift, delta,
                                                   2.0 * jc_cd_coefficient(delta, g, n),
                                                   -rabi_frequency(g.value, n)};
                        }),
          shift};
}

JcBlock jc_lcd_block(const JcConfig& cfg, const Ramp& ramp, int n) {
  if (n < 0) throw std::invalid_argument("jc_lcd_block: photon number must be >= 0");
  const double shift = (2.0 * n + 1.0) * cfg.cavity / 2.0;
  const double delta = cfg.detuning;
  const double np1 = n + 1.0;
  return {n,
          PauliSchedule(ramp.duration(),
                        [=](double t) {
                          const RampSample g = ramp.sample(t);
                          const double d = delta * delta + 4.0 * np1 * g.value * g.value;
                          const double gd2 = g.deriv1 * g.deriv1;
                          const double x = std::sqrt(delta * delta +
                                                     4.0 * np1 * gd2 * delta * delta / (d * d));
                          const double correction =
                              (d * g.deriv2 - 8.0 * np1 * g.value * gd2) / (d * d + 4.0 * np1 * gd2);
                          // operator coefficient of sigma_z is -sqrt(n+1) (g + correction)
                          const double z = -2.0 * std::sqrt(np1) * (g.value + correction);
                          return PauliCoefficients{shift, x, 0.0, z};
                        }),
          shift};
}

JcBlock jc_protocol_block(JcProtocol protocol, const JcConfig& cfg, const Ramp& ramp, int n) {
  switch (protocol) {
    case JcProtocol::bare: return jc_block(cfg, ramp, n);
    case JcProtocol::cd: return jc_cd_block(cfg, ramp, n);
    case JcProtocol::lcd: return jc_lcd_block(cfg, ramp, n);
  }
  throw std::invalid_argument("jc_protocol_block: unknown protocol");
}

std::vector<double> coherent_weights(double alpha, int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("coherent_weights: cutoff must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(cutoff) + 1, 0.0);
  const double mean = alpha * alpha;
  if (mean == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (int n = 0; n <= cutoff; ++n)
    p[n] = std::exp(-mean + 2.0 * n * std::log(std::abs(alpha)) - std::lgamma(n + 1.0));
  return p;
}

double coherent_tail(double alpha, int cutoff) {
  const double mean = alpha * alpha;
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  for (int n = cutoff + 1;; ++n) {
    const double term = std::exp(-mean + 2.0 * n * std::log(std::abs(alpha)) - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean && term < 1e-18 * tail) break;
    if (n > cutoff + 100000) break;
  }
  return tail;
}

EnsembleResult ensemble_run(const JcConfig& cfg, const Ramp& ramp, JcProtocol protocol,
                            const EnsembleOptions& options) {
  cfg.validate();
  const double tail = coherent_tail(cfg.alpha, cfg.cutoff);
  if (tail > options.max_tail) {
    std::ostringstream msg;
    msg << "photon-number tail " << tail << " beyond cutoff N = " << cfg.cutoff
        << " exceeds " << options.max_tail << "; increase the cutoff";
    throw std::domain_error(msg.str());
  }

  EnsembleResult out;
  out.weights = coherent_weights(cfg.alpha, cfg.cutoff);
  const std::size_t blocks = out.weights.size();
  double weight_sum = 0.0;
  for (double p : out.weights) weight_sum += p;

  const std::size_t points = std::max<std::size_t>(options.record_points, 2);
  std::size_t steps = std::max<std::size_t>(options.steps, points - 1);
  steps = (steps + points - 2) / (points - 1) * (points - 1);
  const std::size_t stride = steps / (points - 1);

  std::vector<std::vector<double>> block_series(blocks);
  out.block_costs.assign(blocks, 0.0);
  out.block_fidelity.assign(blocks, 0.0);
  out.final_blocks.assign(blocks, QubitState{{0.0, 0.0}, {0.0, 0.0}});
  std::vector<PauliSchedule> schedules;
  schedules.reserve(blocks);
  for (std::size_t n = 0; n < blocks; ++n)
    schedules.push_back(jc_protocol_block(protocol, cfg, ramp, static_cast<int>(n)).schedule);

  parallel_for(blocks, options.threads, [&](std::size_t n) {
    const PauliSchedule& schedule = schedules[n];
    out.block_costs[n] = integrated_cost(schedule, quadrature_steps_for(cfg));
    if (out.weights[n] == 0.0) return;
    const PauliSchedule bare = jc_block(cfg, ramp, static_cast<int>(n)).schedule;
    PropagationOptions opts;
    opts.steps = steps;
    opts.reference = bare;
    const QubitState psi0 = instantaneous_eigenstates(bare, 0.0).ground;
    const QubitTrajectory traj = propagate(schedule, psi0, opts);
    std::vector<double> series;
    series.reserve(points);
    for (std::size_t i = 0; i < traj.times.size(); i += stride) series.push_back(traj.fidelity[i]);
    block_series[n] = std::move(series);
    out.block_fidelity[n] = traj.fidelity.back();
    const double amp = std::sqrt(out.weights[n]);
    out.final_blocks[n] = {amp * traj.final_state().alpha, amp * traj.final_state().beta};
  });

  out.times.resize(points);
  for (std::size_t i = 0; i < points; ++i)
    out.times[i] = ramp.duration() * static_cast<double>(i) / static_cast<double>(points - 1);
  out.fidelity.assign(points, 0.0);
  for (std::size_t n = 0; n < blocks; ++n) {
    if (out.weights[n] == 0.0) continue;
    for (std::size_t i = 0; i < points; ++i)
      out.fidelity[i] += out.weights[n] * block_series[n][i] / weight_sum;
  }
  out.final_fidelity = out.fidelity.back();

  if (options.cost_mode == EnsembleCostMode::weighted) {
    for (std::size_t n = 0; n < blocks; ++n) out.cost += out.weights[n] * out.block_costs[n];
    out.cost /= weight_sum;
  } else {
    std::size_t m = quadrature_steps_for(cfg);
    const double h = ramp.duration() / static_cast<double>(m);
    auto rate = [&](double t) {
      double sq = 0.0;
      for (const auto& s : schedules) {
        const double r = cost_rate(s(t));
        sq += r * r;
      }
      return std::sqrt(sq);
    };
    double sum = rate(0.0) + rate(ramp.duration());
    for (std::size_t i = 1; i < m; ++i) sum += (i % 2 ? 4.0 : 2.0) * rate(h * i);
    out.cost = sum * h / 3.0 / ramp.duration();
  }
  return out;
}

std::vector<JcCostRow> jc_cost_scan(const JcConfig& cfg, const std::vector<double>& durations,
                                    int n, int threads) {
  cfg.validate();
  std::vector<JcCostRow> rows(durations.size());
  parallel_for(durations.size(), threads, [&](std::size_t i) {
    JcConfig c = cfg;
    c.duration = durations[i];
    const Ramp ramp = c.quintic_ramp();
    rows[i] = {durations[i], integrated_cost(jc_cd_block(c, ramp, n).schedule, 20000),
               integrated_cost(jc_lcd_block(c, ramp, n).schedule, 20000)};
  });
  return rows;
}

std::vector<JcCostRow> jc_ensemble_cost_scan(const JcConfig& cfg,
                                             const std::vector<double>& durations, int threads) {
  cfg.validate();
  const std::vector<double> p = coherent_weights(cfg.alpha, cfg.cutoff);
  double weight_sum = 0.0;
  for (double w : p) weight_sum += w;
  std::vector<JcCostRow> rows(durations.size());
  parallel_for(durations.size(), threads, [&](std::size_t i) {
    JcConfig c = cfg;
    c.duration = durations[i];
    const Ramp ramp = c.quintic_ramp();
    JcCostRow row{durations[i], 0.0, 0.0};
    for (int n = 0; n <= cfg.cutoff; ++n) {
      if (p[n] == 0.0) continue;
      row.cd += p[n] * integrated_cost(jc_cd_block(c, ramp, n).schedule, 20000);
      row.lcd += p[n] * integrated_cost(jc_lcd_block(c, ramp, n).schedule, 20000);
    }
    row.cd /= weight_sum;
    row.lcd /= weight_sum;
    rows[i] = row;
  });
  return rows;
}

}  // namespace stacost
