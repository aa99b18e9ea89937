#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "neuroevo/errors.hpp"

namespace neuroevo {

struct NelderMeadOptions {
  double x_tolerance = 1e-8;  // stop once every vertex is this close to the best one
  int max_iterations = 2000;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimizes `f` from `start`, building the initial simplex by offsetting each
// coordinate by `step[i]`. Non-finite objective values are treated as +inf.
template <typename F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> start, const std::vector<double>& step,
                             const NelderMeadOptions& opt = {}) {
  const std::size_t n = start.size();
  if (n == 0 || step.size() != n) throw InvalidArgument("nelder_mead: start/step size mismatch");

  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  std::vector<double> vals(n + 1);
  for (std::size_t j = 0; j <= n; ++j) vals[j] = eval(pts[j]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto along = [&](std::vector<double>& out, double t) {
    // out = centroid + t * (centroid - worst)
    const auto& worst = pts[order[n]];
    for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + t * (centroid[i] - worst[i]);
  };

  NelderMeadResult res;
  int it = 0;
  for (;; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });

    double spread = 0.0;
    const auto& best = pts[order[0]];
    for (std::size_t j = 1; j <= n; ++j) {
      for (std::size_t i = 0; i < n; ++i) spread = std::max(spread, std::abs(pts[order[j]][i] - best[i]));
    }
    if (spread < opt.x_tolerance) {
      res.converged = true;
      break;
    }
    if (it >= opt.max_iterations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[order[j]][i];
    }
    for (double& v : centroid) v /= static_cast<double>(n);

    const std::size_t worst = order[n];
    const double f_best = vals[order[0]];
    const double f_second = vals[order[n - 1]];
    const double f_worst = vals[worst];

    along(trial, opt.reflection);
    const double f_r = eval(trial);
    if (f_r < f_best) {
      along(trial2, opt.reflection * opt.expansion);
      const double f_e = eval(trial2);
      if (f_e < f_r) {
        pts[worst] = trial2;
        vals[worst] = f_e;
      } else {
        pts[worst] = trial;
        vals[worst] = f_r;
      }
      continue;
    }
    if (f_r < f_second) {
      pts[worst] = trial;
      vals[worst] = f_r;
      continue;
    }
    if (f_r < f_worst) {
      along(trial2, opt.reflection * opt.contraction);  // outside contraction
      const double f_c = eval(trial2);
      if (f_c <= f_r) {
        pts[worst] = trial2;
        vals[worst] = f_c;
        continue;
      }
    } else {
      along(trial2, -opt.contraction);  // inside contraction
      const double f_c = eval(trial2);
      if (f_c < f_worst) {
        pts[worst] = trial2;
        vals[worst] = f_c;
        continue;
      }
    }
    const auto anchor = pts[order[0]];
    for (std::size_t j = 1; j <= n; ++j) {
      auto& p = pts[order[j]];
      for (std::size_t i = 0; i < n; ++i) p[i] = anchor[i] + opt.shrink * (p[i] - anchor[i]);
      vals[order[j]] = eval(p);
    }
  }
  const std::size_t b = *std::min_element(order.begin(), order.end(),
                                          [&](std::size_t a, std::size_t c) { return vals[a] < vals[c]; });
  res.x = pts[b];
  res.value = vals[b];
  res.iterations = it;
  return res;
}

}  // namespace neuroevo
