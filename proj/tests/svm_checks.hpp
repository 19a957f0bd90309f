#pragma once

// Dataset generators and independent SVM checks shared by the unit tests and
// the acceptance runner.

#include <cmath>
#include <random>
#include <vector>

#include "mammo/svm.hpp"

namespace svmcheck {

using mammo::KernelKind;
using mammo::KernelSpec;
using mammo::Sample;

inline double kernel(const KernelSpec& k, const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    d2 += (a[i] - b[i]) * (a[i] - b[i]);
  }
  const double g = *k.gamma;
  switch (k.kind) {
    case KernelKind::linear: return dot;
    case KernelKind::polynomial: return std::pow(g * dot + k.coef, k.degree);
    case KernelKind::rbf: return std::exp(-g * d2);
    case KernelKind::sigmoid: return std::tanh(g * dot + k.coef);
  }
  return 0.0;
}

inline double objective(const std::vector<Sample>& d, const KernelSpec& k, const std::vector<double>& a) {
  double w = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    w += a[i];
    for (std::size_t j = 0; j < d.size(); ++j) w -= 0.5 * a[i] * a[j] * d[i].y * d[j].y * kernel(k, d[i].x, d[j].x);
  }
  return w;
}

inline std::vector<double> decisions(const std::vector<Sample>& d, const KernelSpec& k, const std::vector<double>& a,
                                     double b) {
  std::vector<double> f(d.size(), b);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) f[i] += a[j] * d[j].y * kernel(k, d[j].x, d[i].x);
  return f;
}

// Bias from free alphas, else the midpoint of the feasible interval.
inline double bias(const std::vector<Sample>& d, const KernelSpec& k, const std::vector<double>& a, double c) {
  const auto g = decisions(d, k, a, 0.0);
  double sum = 0.0, lo = -INFINITY, hi = INFINITY;
  int free = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = d[i].y - g[i];
    if (a[i] > 1e-8 && a[i] < c - 1e-8) {
      sum += v;
      ++free;
    } else if ((a[i] <= 1e-8) == (d[i].y > 0)) {
      lo = std::max(lo, v);
    } else {
      hi = std::min(hi, v);
    }
  }
  if (free) return sum / free;
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  return std::isfinite(lo) ? lo : std::isfinite(hi) ? hi : 0.0;
}

// Tolerance-relaxed KKT conditions.
inline bool kkt_holds(const std::vector<Sample>& d, const KernelSpec& k, const std::vector<double>& a, double b,
                      double c, double tol, double eps = 1e-8) {
  const auto f = decisions(d, k, a, b);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double m = d[i].y * f[i];
    if (a[i] <= eps) {
      if (m < 1 - tol) return false;
    } else if (a[i] >= c - eps) {
      if (m > 1 + tol) return false;
    } else if (std::abs(m - 1) > tol) {
      return false;
    }
  }
  return true;
}

struct ExactSolution {
  std::vector<double> alphas;
  double bias = 0.0;
  bool found = false;
};

// Exact dual optimum for tiny n by active-set enumeration: every alpha is 0, C
// or free; free ones solve y_i f(x_i) = 1 together with sum a_i y_i = 0. Among
// KKT points the one with the largest objective is returned.
inline ExactSolution exact_qp(const std::vector<Sample>& d, const KernelSpec& k, double c, double tol = 1e-9) {
  const int n = static_cast<int>(d.size());
  std::vector<double> q(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q[i * n + j] = d[i].y * d[j].y * kernel(k, d[i].x, d[j].x);
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  ExactSolution best;
  double best_w = -INFINITY;
  for (int code = 0; code < combos; ++code) {
    std::vector<int> state(n);  // 0 lower, 1 upper, 2 free
    for (int i = 0, v = code; i < n; ++i, v /= 3) state[i] = v % 3;
    std::vector<int> fr;
    std::vector<double> a(n, 0.0);
    for (int i = 0; i < n; ++i) {
      if (state[i] == 1) a[i] = c;
      if (state[i] == 2) fr.push_back(i);
    }
    const int f = static_cast<int>(fr.size());
    double b = 0.0;
    if (f > 0) {
      // Unknowns: a_F then b. Rows: free KKT equalities, then the equality constraint.
      const int m = f + 1;
      std::vector<double> A(m * (m + 1), 0.0);
      for (int r = 0; r < f; ++r) {
        const int i = fr[r];
        double rhs = 1.0;
        for (int j = 0; j < n; ++j)
          if (state[j] == 1) rhs -= q[i * n + j] * c;
        for (int s = 0; s < f; ++s) A[r * (m + 1) + s] = q[i * n + fr[s]];
        A[r * (m + 1) + f] = d[i].y;
        A[r * (m + 1) + m] = rhs;
      }
      double rhs = 0.0;
      for (int j = 0; j < n; ++j)
        if (state[j] == 1) rhs -= c * d[j].y;
      for (int s = 0; s < f; ++s) A[f * (m + 1) + s] = d[fr[s]].y;
      A[f * (m + 1) + m] = rhs;
      bool singular = false;
      for (int col = 0; col < m && !singular; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
          if (std::abs(A[r * (m + 1) + col]) > std::abs(A[piv * (m + 1) + col])) piv = r;
        if (std::abs(A[piv * (m + 1) + col]) < 1e-12) {
          singular = true;
          break;
        }
        for (int s = 0; s <= m; ++s) std::swap(A[col * (m + 1) + s], A[piv * (m + 1) + s]);
        for (int r = 0; r < m; ++r) {
          if (r == col) continue;
          const double factor = A[r * (m + 1) + col] / A[col * (m + 1) + col];
          for (int s = col; s <= m; ++s) A[r * (m + 1) + s] -= factor * A[col * (m + 1) + s];
        }
      }
      if (singular) continue;
      bool inside = true;
      for (int s = 0; s < f; ++s) {
        a[fr[s]] = A[s * (m + 1) + m] / A[s * (m + 1) + s];
        inside = inside && a[fr[s]] > 0.0 && a[fr[s]] < c;
      }
      if (!inside) continue;
      b = A[f * (m + 1) + m] / A[f * (m + 1) + f];
    } else {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += a[i] * d[i].y;
      if (std::abs(sum) > tol) continue;
      b = bias(d, k, a, c);
    }
    const auto fx = decisions(d, k, a, b);
    bool kkt = true;
    for (int i = 0; i < n && kkt; ++i) {
      const double mrg = d[i].y * fx[i];
      if (state[i] == 0) kkt = mrg >= 1 - 1e-9;
      if (state[i] == 1) kkt = mrg <= 1 + 1e-9;
    }
    if (!kkt) continue;
    const double w = objective(d, k, a);
    if (w > best_w) {
      best_w = w;
      best = {a, b, true};
    }
  }
  return best;
}

inline std::vector<Sample> random_dataset(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Sample> d(n);
  for (int i = 0; i < n; ++i) {
    d[i].y = i == 0 ? 1 : i == 1 ? -1 : (rng() % 2 ? 1 : -1);
    for (int k = 0; k < m; ++k) d[i].x.push_back(g(rng) + 0.8 * d[i].y);
  }
  std::shuffle(d.begin(), d.end(), rng);
  return d;
}

inline KernelSpec random_kernel(std::mt19937_64& rng, int which) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  KernelSpec k;
  k.kind = static_cast<KernelKind>(which % 4);
  switch (k.kind) {
    case KernelKind::linear: k.gamma = 1.0; break;
    case KernelKind::polynomial:
      k.gamma = 0.3 + 0.7 * u(rng);
      k.coef = 1.0;
      k.degree = 2 + static_cast<int>(rng() % 2);
      break;
    case KernelKind::rbf: k.gamma = 0.2 + 1.3 * u(rng); break;
    case KernelKind::sigmoid:
      k.gamma = 0.05 + 0.2 * u(rng);
      k.coef = 0.0;
      break;
  }
  return k;
}

// Grid resolution keeping the oracle search to a few million points.
inline int grid_steps_for(int n) {
  switch (n) {
    case 1:
    case 2:
    case 3: return 60;
    case 4: return 30;
    case 5: return 16;
    default: return 10;
  }
}

}  // namespace svmcheck
