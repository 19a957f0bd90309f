#pragma once

// Exhaustive grid search over the SVM dual, used to check SMO on tiny
// problems. Independent of the SMO code path: it evaluates the objective from
// the Gram matrix directly and never consults KKT conditions.

#include <cstdlib>
#include <span>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/svm.hpp"

namespace mammo {

/// Grid argmax of the dual over {0, C/g, ..., C}^n with |sum a_i y_i| <= C/g.
/// Ties keep the lexicographically first grid point.
inline std::vector<double> brute_force_qp(std::span<const Sample> data, const KernelSpec& kernel,
                                          double c, int grid_steps) {
  const int n = static_cast<int>(data.size());
  if (n > 6) throw TooLarge("brute-force QP supports at most 6 samples, got " + std::to_string(n));
  if (n == 0) throw EmptyDataset("no samples");
  if (grid_steps < 1) throw InvalidConfig("grid_steps must be >= 1");
  const double step = c / grid_steps;

  std::vector<double> q(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      q[i * n + j] = data[i].y * data[j].y * kernel_eval(kernel, data[i].x, data[j].x);
    }
  }

  std::vector<int> k(n, 0), best_k(n, 0);
  double best_w = 0.0;  // all-zero point is always feasible with W = 0
  // cross[i] = sum_{j < depth} q_ij a_j, maintained per depth.
  std::vector<std::vector<double>> cross(n + 1, std::vector<double>(n, 0.0));

  const auto recurse = [&](auto&& self, int depth, int sum, double w) -> void {
    const int remaining = n - depth;
    if (remaining == 0) {
      if (std::abs(sum) <= 1 && w > best_w) {
        best_w = w;
        best_k = k;
      }
      return;
    }
    if (std::abs(sum) > 1 + remaining * grid_steps) return;
    const int y = data[depth].y;
    for (int v = 0; v <= grid_steps; ++v) {
      const int next_sum = sum + y * v;
      if (remaining == 1 && std::abs(next_sum) > 1) continue;
      const double a = v * step;
      const double dw = a - 0.5 * q[depth * n + depth] * a * a - a * cross[depth][depth];
      k[depth] = v;
      for (int i = 0; i < n; ++i) cross[depth + 1][i] = cross[depth][i] + q[i * n + depth] * a;
      self(self, depth + 1, next_sum, w + dw);
    }
    k[depth] = 0;
  };
  recurse(recurse, 0, 0, 0.0);

  std::vector<double> alphas(n);
  for (int i = 0; i < n; ++i) alphas[i] = best_k[i] * step;
  return alphas;
}

}  // namespace mammo
