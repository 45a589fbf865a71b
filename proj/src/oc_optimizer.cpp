#include "stacost/oc_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "stacost/nelder_mead.hpp"
#include "stacost/parallel.hpp"

namespace stacost {

void OcProblem::validate() const {
  lz.validate();
  if (n_max < 1) throw std::invalid_argument("OcProblem: n_max must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("OcProblem: gamma must be positive");
  const double qsl = qsl_time(lz);
  if (!(lz.duration > qsl)) {
    std::ostringstream msg;
    msg << "OcProblem: duration " << lz.duration << " must exceed the speed limit " << qsl;
    throw std::invalid_argument(msg.str());
  }
}

std::size_t OcProblem::evaluation_steps() const {
  if (steps > 0) return steps;
  return std::max<std::size_t>(4000, static_cast<std::size_t>(std::ceil(60.0 * lz.duration)));
}

Ramp oc_ramp(const OcProblem& problem, std::span<const double> params) {
  const std::size_t n = static_cast<std::size_t>(problem.n_max);
  if (params.size() != 2 * n) throw std::invalid_argument("oc_ramp: expected 2 * n_max params");
  std::vector<FourierTerm> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = {params[i], params[n + i]};
  return oc_fourier_ramp(problem.lz.g0, problem.lz.duration, std::move(terms));
}

double composite_objective(double q, double cost, double gamma, double q_floor) {
  return std::pow(std::max(q, q_floor), gamma) * cost;
}

OcEvaluation evaluate(const OcProblem& problem, std::span<const double> params) {
  const PauliSchedule schedule = lz_bare(problem.lz.gap, oc_ramp(problem, params));
  const std::size_t steps = problem.evaluation_steps();
  const QubitState psi = propagate_final(schedule, problem.lz.initial_state(), steps);
  OcEvaluation e;
  e.q = std::max(0.0, 1.0 - fidelity(problem.lz.target_state(), psi));
  e.cost = integrated_cost(schedule, steps);
  e.objective = composite_objective(e.q, e.cost, problem.gamma, problem.q_floor);
  return e;
}

double objective(const OcProblem& problem, std::span<const double> params) {
  return evaluate(problem, params).objective;
}

namespace {

struct RunOutput {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::vector<OcTracePoint> trace;  // evaluation indices local to the run
  std::size_t evaluations = 0;
  // best point under the final exponent among those meeting the q target
  std::vector<double> feasible_x;
  double feasible_value = std::numeric_limits<double>::infinity();
};

RunOutput simplex_run(const OcProblem& problem, double final_gamma, std::vector<double> x0,
                      const std::vector<double>& steps, std::size_t budget) {
  RunOutput out;
  NelderMeadOptions opts;
  opts.max_evaluations = budget;
  opts.f_tolerance = 0.0;
  opts.x_tolerance = 1e-13;
  std::size_t count = 0;
  auto f = [&](std::span<const double> x) {
    const OcEvaluation e = evaluate(problem, x);
    ++count;
    if (e.objective < out.value) {
      out.value = e.objective;
      out.x.assign(x.begin(), x.end());
      out.trace.push_back({count, problem.gamma, e.objective, e.q, e.cost, 0.0});
    }
    if (e.q <= problem.q_target) {
      const double v = composite_objective(e.q, e.cost, final_gamma, problem.q_floor);
      if (v < out.feasible_value) {
        out.feasible_value = v;
        out.feasible_x.assign(x.begin(), x.end());
      }
    }
    return e.objective;
  };
  const auto res = nelder_mead(f, std::move(x0), steps, opts);
  out.evaluations = res.evaluations;
  return out;
}

std::vector<double> random_steps(const OcProblem& problem, std::mt19937_64& rng, double scale) {
  const std::size_t n = static_cast<std::size_t>(problem.n_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> steps(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const double base = i < n ? problem.amplitude_step : problem.phase_step;
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    steps[i] = scale * base * sign * (0.5 + unit(rng));
  }
  return steps;
}

}  // namespace

OcResult optimize(const OcProblem& problem, int threads) {
  problem.validate();
  const std::size_t dim = problem.parameter_count();
  const std::size_t n = static_cast<std::size_t>(problem.n_max);
  const int starts = std::max(problem.starts, 1);
  const int restarts = std::max(problem.restarts, 0);

  std::vector<double> gammas;
  for (double g : problem.warmup_gammas)
    if (g > problem.gamma) gammas.push_back(g);
  gammas.push_back(problem.gamma);
  // runs: the independent starts, one per later warm-up stage, then the final polishing runs
  const std::size_t runs = static_cast<std::size_t>(starts) + (gammas.size() - 1) +
                           static_cast<std::size_t>(restarts);
  const std::size_t budget = std::max<std::size_t>(problem.max_evaluations / runs, 2 * dim + 2);

  auto stage_problem = [&](double gamma) {
    OcProblem p = problem;
    p.gamma = gamma;
    return p;
  };

  std::mt19937_64 rng(problem.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> x0(starts), steps0(starts);
  for (int s = 0; s < starts; ++s) {
    x0[s].assign(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      x0[s][i] = s == 0 ? 0.0 : problem.amplitude_step * (2.0 * unit(rng) - 1.0);
      x0[s][n + i] = 2.0 * std::acos(-1.0) * unit(rng);
    }
    steps0[s] = random_steps(problem, rng, 1.0);
  }

  OcResult result;
  result.duration = problem.lz.duration;
  std::size_t offset = 0;
  double best_q = std::numeric_limits<double>::infinity();
  double stage_best = std::numeric_limits<double>::infinity();
  std::vector<double> x_best;
  std::vector<double> x_feasible;
  double feasible_best = std::numeric_limits<double>::infinity();
  auto merge = [&](const RunOutput& run) {
    if (!run.feasible_x.empty() && run.feasible_value < feasible_best) {
      feasible_best = run.feasible_value;
      x_feasible = run.feasible_x;
    }
    for (const auto& pt : run.trace) {
      if (pt.objective < stage_best) {
        stage_best = pt.objective;
        best_q = std::min(best_q, pt.q);
        OcTracePoint p = pt;
        p.evaluation += offset;
        p.best_q = best_q;
        result.trace.push_back(p);
      }
    }
    if (!run.x.empty() && (x_best.empty() || run.value <= stage_best)) x_best = run.x;
    offset += run.evaluations;
  };

  {
    const OcProblem p = stage_problem(gammas.front());
    std::vector<RunOutput> first(starts);
    parallel_for(static_cast<std::size_t>(starts), threads, [&](std::size_t s) {
      first[s] = simplex_run(p, problem.gamma, x0[s], steps0[s], budget);
    });
    for (const auto& run : first) merge(run);
  }

  for (std::size_t k = 1; k < gammas.size(); ++k) {
    const OcProblem p = stage_problem(gammas[k]);
    stage_best = std::numeric_limits<double>::infinity();
    const int polish = k + 1 == gammas.size() ? std::max(restarts, 1) : 1;
    for (int r = 0; r < polish; ++r) {
      const double scale = std::pow(0.5, r);
      merge(simplex_run(p, problem.gamma, x_best, random_steps(problem, rng, scale), budget));
    }
  }
  if (gammas.size() == 1) {
    const OcProblem p = stage_problem(gammas.front());
    for (int r = 0; r < restarts; ++r) {
      const double scale = std::pow(0.5, r + 1);
      merge(simplex_run(p, problem.gamma, x_best, random_steps(problem, rng, scale), budget));
    }
  }

  if (!x_feasible.empty()) {
    result.params = x_feasible;
    result.objective = feasible_best;
  } else {
    result.params = x_best;
    result.objective = stage_best;
  }
  result.evaluations = offset;
  const PauliSchedule schedule = lz_bare(problem.lz.gap, oc_ramp(problem, result.params));
  const ConvergedRun check = propagate_converged(schedule, problem.lz.initial_state(),
                                                 problem.lz.target_state(),
                                                 problem.evaluation_steps(), 1e-12, 6);
  result.q = std::max(0.0, 1.0 - check.final_fidelity);
  result.cost = integrated_cost(schedule, std::max<std::size_t>(check.steps, 20000));
  result.reached_target = result.q <= problem.q_target;
  return result;
}

std::vector<OcResult> tau_scan(const OcProblem& problem, const std::vector<double>& durations,
                               int threads) {
  for (double tau : durations) {
    OcProblem p = problem;
    p.lz.duration = tau;
    p.validate();
  }
  std::vector<OcResult> out(durations.size());
  parallel_for(durations.size(), threads, [&](std::size_t i) {
    OcProblem p = problem;
    p.lz.duration = durations[i];
    out[i] = optimize(p);
  });
  return out;
}

nlohmann::json to_json(const OcProblem& problem, const OcResult& result) {
  return {{"tau", result.duration},      {"gamma", problem.gamma},
          {"n_max", problem.n_max},      {"seed", problem.seed},
          {"best_params", result.params}, {"q", result.q},
          {"C", result.cost},            {"objective", result.objective},
          {"evaluations", result.evaluations}, {"reached_target", result.reached_target}};
}

void write_trace_csv(std::ostream& out, const OcResult& result) {
  const auto old = out.precision(15);
  out << "evaluation,gamma,objective,q,C,best_q\n";
  for (const auto& p : result.trace)
    out << p.evaluation << ',' << p.gamma << ',' << p.objective << ',' << p.q << ',' << p.cost
        << ',' << p.best_q << '\n';
  out.precision(old);
}

}  // namespace stacost
