#pragma once

// Nelder-Mead simplex minimization with dimension-adaptive expansion,
// contraction and shrink coefficients.  Deterministic given the start point.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace lopsim::detail {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

template <typename F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0, double initial_step,
                             int max_iterations, double spread_tolerance) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead: empty start point");

  const double nd = static_cast<double>(dim);
  const double reflect_c = 1.0;
  const double expand_c = 1.0 + 2.0 / nd;
  const double contract_c = std::clamp(0.75 - 1.0 / (2.0 * nd), 0.25, 0.75);
  const double shrink_c = std::clamp(1.0 - 1.0 / nd, 0.5, 0.95);

  std::vector<std::vector<double>> verts(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) verts[i + 1][i] += initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = f(verts[i]);

  std::vector<std::size_t> order(dim + 1);
  int iteration = 0;
  for (; iteration < max_iterations; ++iteration) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order[0];
    const std::size_t second_worst = order[dim - 1];
    const std::size_t worst = order[dim];

    if (values[worst] - values[best] <= spread_tolerance) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += verts[i][k];
    }
    for (std::size_t k = 0; k < dim; ++k) centroid[k] /= nd;

    auto blend = [&](double coeff) {
      std::vector<double> p(dim);
      for (std::size_t k = 0; k < dim; ++k) p[k] = centroid[k] + coeff * (centroid[k] - verts[worst][k]);
      return p;
    };

    std::vector<double> reflected = blend(reflect_c);
    const double fr = f(reflected);

    if (fr < values[best]) {
      std::vector<double> expanded = blend(expand_c);
      const double fe = f(expanded);
      if (fe < fr) {
        verts[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        verts[worst] = std::move(reflected);
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second_worst]) {
      verts[worst] = std::move(reflected);
      values[worst] = fr;
      continue;
    }

    if (fr < values[worst]) {
      std::vector<double> contracted = blend(contract_c);
      const double fc = f(contracted);
      if (fc <= fr) {
        verts[worst] = std::move(contracted);
        values[worst] = fc;
        continue;
      }
    } else {
      std::vector<double> contracted = blend(-contract_c);
      const double fc = f(contracted);
      if (fc < values[worst]) {
        verts[worst] = std::move(contracted);
        values[worst] = fc;
        continue;
      }
    }

    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k) {
        verts[i][k] = verts[best][k] + shrink_c * (verts[i][k] - verts[best][k]);
      }
      values[i] = f(verts[i]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i) {
    if (values[i] < values[best]) best = i;
  }
  return NelderMeadResult{verts[best], values[best], iteration};
}

}  // namespace lopsim::detail
