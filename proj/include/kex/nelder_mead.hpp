#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "kex/errors.hpp"

namespace kex {

struct NelderMeadResult {
  std::vector<double> x;
  double fmin = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Downhill simplex (reflection / expansion / contraction / shrink) with the
// standard coefficients. Deterministic: vertex ordering ties break on index.
// Converged when the simplex f-spread falls below ftol relative to the best
// value's magnitude.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::span<const double> x0,
                             std::span<const double> step, int max_iters,
                             double ftol) {
  const std::size_t dim = x0.size();
  if (dim == 0 || step.size() != dim)
    throw ConfigError("nelder_mead: empty start point or step size mismatch");

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  std::vector<std::vector<double>> x(dim + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t d = 0; d < dim; ++d) x[d + 1][d] += step[d];
  std::vector<double> fx(dim + 1);
  for (std::size_t v = 0; v <= dim; ++v) fx[v] = f(x[v]);

  std::vector<std::size_t> rank(dim + 1);
  auto sort_vertices = [&] {
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
  };

  NelderMeadResult result;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    sort_vertices();
    const std::size_t best = rank[0], worst = rank[dim];
    if (std::abs(fx[worst] - fx[best]) <=
        ftol * (std::abs(fx[best]) + std::abs(fx[worst]) + 1e-12)) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += x[v][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto along = [&](double t) {
      std::vector<double> p(dim);
      for (std::size_t d = 0; d < dim; ++d)
        p[d] = centroid[d] + t * (centroid[d] - x[worst][d]);
      return p;
    };

    auto reflected = along(kReflect);
    const double fr = f(reflected);
    if (fr < fx[rank[0]]) {
      auto expanded = along(kExpand);
      const double fe = f(expanded);
      if (fe < fr) {
        x[worst] = std::move(expanded);
        fx[worst] = fe;
      } else {
        x[worst] = std::move(reflected);
        fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[rank[dim - 1]]) {
      x[worst] = std::move(reflected);
      fx[worst] = fr;
      continue;
    }
    auto contracted = along(fr < fx[worst] ? kContract : -kContract);
    const double fc = f(contracted);
    if (fc < std::min(fr, fx[worst])) {
      x[worst] = std::move(contracted);
      fx[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == rank[0]) continue;
      for (std::size_t d = 0; d < dim; ++d)
        x[v][d] = x[rank[0]][d] + kShrink * (x[v][d] - x[rank[0]][d]);
      fx[v] = f(x[v]);
    }
  }

  sort_vertices();
  result.x = x[rank[0]];
  result.fmin = fx[rank[0]];
  result.iterations = iter;
  return result;
}

}  // namespace kex
