#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "stacost/landau_zener.hpp"
#include "stacost/ramp.hpp"

namespace stacost {

/// Fourier-parameterised Landau-Zener sweep minimising q^gamma * C.
struct OcProblem {
  LzConfig lz;                 // lz.duration is the protocol duration tau
  int n_max = 30;
  double gamma = 5e-3;
  std::size_t max_evaluations = 24000;
  int starts = 1;              // independent simplex runs from seeded random points
  int restarts = 2;            // polishing runs at the final gamma from the best point found
  /// Larger exponents optimised first, each stage seeding the next; the last stage uses gamma.
  std::vector<double> warmup_gammas = {1.0, 0.1, 0.02};
  std::uint64_t seed = 1;
  std::size_t steps = 0;       // propagation steps per evaluation; 0 picks one from tau
  double q_target = 1e-7;
  double q_floor = 1e-16;
  double amplitude_step = 0.02;
  double phase_step = 0.5;

  /// Throws when tau <= tau_QSL, gamma <= 0 or n_max < 1.
  void validate() const;
  std::size_t parameter_count() const { return 2 * static_cast<std::size_t>(n_max); }
  std::size_t evaluation_steps() const;
};

struct OcEvaluation {
  double objective = 0.0;
  double q = 0.0;
  double cost = 0.0;
};

/// params = (a_1..a_n, phi_1..phi_n).
Ramp oc_ramp(const OcProblem& problem, std::span<const double> params);
OcEvaluation evaluate(const OcProblem& problem, std::span<const double> params);
double objective(const OcProblem& problem, std::span<const double> params);
/// q_clamped^gamma * C with q clamped below at q_floor.
double composite_objective(double q, double cost, double gamma, double q_floor = 1e-16);

struct OcTracePoint {
  std::size_t evaluation = 0;
  double gamma = 0.0;      // exponent of the stage that produced the point
  double objective = 0.0;
  double q = 0.0;
  double cost = 0.0;
  double best_q = 0.0;     // smallest q seen so far
};

struct OcResult {
  double duration = 0.0;
  std::vector<double> params;
  double q = 0.0;          // from a step-converged propagation of the best parameters
  double cost = 0.0;
  double objective = 0.0;
  std::size_t evaluations = 0;
  bool reached_target = false;
  std::vector<OcTracePoint> trace;  // every improvement of a stage's best objective
};

/// Throws std::invalid_argument for tau <= tau_QSL; an unmet q target is reported, not thrown.
OcResult optimize(const OcProblem& problem, int threads = 1);

/// Independent optimisations per duration, seeds shared.
std::vector<OcResult> tau_scan(const OcProblem& problem, const std::vector<double>& durations,
                               int threads = 1);

nlohmann::json to_json(const OcProblem& problem, const OcResult& result);
void write_trace_csv(std::ostream& out, const OcResult& result);

}  // namespace stacost
