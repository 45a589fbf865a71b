#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stacost {

struct NelderMeadOptions {
  std::size_t max_evaluations = 2000;
  /// Stop when the spread of simplex values drops below this.
  double f_tolerance = 1e-14;
  /// Stop when the simplex diameter drops below this.
  double x_tolerance = 1e-12;
  /// Dimension-dependent coefficients (Gao and Han); plain coefficients otherwise.
  bool adaptive = true;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;
using EvaluationObserver = std::function<void(std::span<const double>, double)>;

/// Downhill simplex around x0 with one axis step per coordinate.
/// on_evaluation (optional) sees every (x, f) pair in evaluation order.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const std::vector<double>& steps, const NelderMeadOptions& opts,
                             const EvaluationObserver& on_evaluation = {});

}  // namespace stacost
