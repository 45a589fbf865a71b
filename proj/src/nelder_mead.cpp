#include "stacost/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace stacost {

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const std::vector<double>& steps, const NelderMeadOptions& opts,
                             const EvaluationObserver& on_evaluation) {
  const std::size_t n = x0.size();
  if (n == 0 || steps.size() != n)
    throw std::invalid_argument("nelder_mead: step vector must match the dimension");

  const double dim = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = opts.adaptive && n > 1 ? 1.0 + 2.0 / dim : 2.0;
  const double contract = opts.adaptive && n > 1 ? 0.75 - 0.5 / dim : 0.5;
  const double shrink = opts.adaptive && n > 1 ? 1.0 - 1.0 / dim : 0.5;

  std::size_t evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    ++evaluations;
    if (on_evaluation) on_evaluation(x, v);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
  };

  while (evaluations < opts.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    if (std::abs(values[worst] - values[best]) <= opts.f_tolerance) {
      double diameter = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
      if (diameter <= opts.x_tolerance) break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= dim;

    point(reflect, simplex[worst], trial);
    const double fr = eval(trial);
    if (fr < values[best]) {
      point(reflect * expand, simplex[worst], trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    point(outside ? reflect * contract : -contract, simplex[worst], trial2);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        simplex[i][j] = simplex[best][j] + shrink * (simplex[i][j] - simplex[best][j]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evaluations};
}

}  // namespace stacost
