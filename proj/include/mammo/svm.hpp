#pragma once

// Binary soft-margin SVM.
//
// Training solves the dual
//   max W(a) = sum a_i - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
//   s.t. 0 <= a_i <= C, sum a_i y_i = 0
// with a deterministic SMO: indices are scanned in order, the first KKT
// violator is paired with the index maximizing |E_i - E_j| (lowest index on
// ties), and a full Gram matrix is precomputed. Labels are +1 / -1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mammo/error.hpp"

namespace mammo {

enum class KernelKind { linear, polynomial, rbf, sigmoid };

inline std::string kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::rbf: return "rbf";
    case KernelKind::sigmoid: return "sigmoid";
  }
  return "?";
}

inline KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "linear") return KernelKind::linear;
  if (s == "polynomial" || s == "poly") return KernelKind::polynomial;
  if (s == "rbf") return KernelKind::rbf;
  if (s == "sigmoid") return KernelKind::sigmoid;
  throw InvalidKernel("unknown kernel '" + s + "'");
}

struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  std::optional<double> gamma;  // unset with sigma unset: 1 / dimension at training time
  std::optional<double> sigma;  // rbf alternative: gamma = 1 / (2 sigma^2)
  double coef = 1.0;
  int degree = 3;

  void validate() const {
    if (gamma && !(*gamma > 0.0)) throw InvalidKernel("gamma must be > 0");
    if (sigma && !(*sigma > 0.0)) throw InvalidKernel("sigma must be > 0");
    if (gamma && sigma && std::abs(*gamma - 1.0 / (2.0 * *sigma * *sigma)) > 1e-12) {
      throw InvalidKernel("gamma and sigma are inconsistent");
    }
    if (degree < 1) throw InvalidKernel("degree must be >= 1");
    if (!std::isfinite(coef)) throw InvalidKernel("coef must be finite");
  }

  bool has_gamma() const noexcept { return gamma.has_value() || sigma.has_value(); }

  double effective_gamma() const {
    if (gamma) return *gamma;
    if (sigma) return 1.0 / (2.0 * *sigma * *sigma);
    throw InvalidKernel("kernel gamma is unresolved");
  }

  /// Copy with gamma filled in (1 / dim when neither gamma nor sigma is set).
  KernelSpec resolved(std::size_t dim) const {
    validate();
    KernelSpec k = *this;
    if (!k.gamma) k.gamma = k.sigma ? 1.0 / (2.0 * *k.sigma * *k.sigma) : 1.0 / static_cast<double>(dim);
    return k;
  }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

inline double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch("kernel operands have sizes " + std::to_string(x.size()) + " and " +
                            std::to_string(y.size()));
  }
  const auto dot = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  switch (spec.kind) {
    case KernelKind::linear:
      return dot();
    case KernelKind::polynomial:
      return std::pow(spec.effective_gamma() * dot() + spec.coef, spec.degree);
    case KernelKind::rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
      }
      return std::exp(-spec.effective_gamma() * d2);
    }
    case KernelKind::sigmoid:
      return std::tanh(spec.effective_gamma() * dot() + spec.coef);
  }
  return 0.0;
}

struct Sample {
  std::vector<double> x;
  int y = 1;  // +1 or -1
};

struct ScalerStats {
  std::vector<double> mean;
  std::vector<double> std;

  static ScalerStats identity(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
  }
  std::size_t dim() const noexcept { return mean.size(); }

  friend bool operator==(const ScalerStats&, const ScalerStats&) = default;
};

/// Per-component mean and population standard deviation.
inline ScalerStats fit_scaler(std::span<const Sample> data) {
  if (data.empty()) throw EmptyDataset("cannot fit a scaler on no samples");
  const std::size_t m = data.front().x.size();
  ScalerStats s{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  for (const auto& smp : data) {
    if (smp.x.size() != m) throw DimensionMismatch("inconsistent sample dimensions");
    for (std::size_t k = 0; k < m; ++k) s.mean[k] += smp.x[k];
  }
  const double n = static_cast<double>(data.size());
  for (double& v : s.mean) v /= n;
  for (const auto& smp : data) {
    for (std::size_t k = 0; k < m; ++k) {
      const double d = smp.x[k] - s.mean[k];
      s.std[k] += d * d;
    }
  }
  for (double& v : s.std) v = std::sqrt(v / n);
  return s;
}

/// (x - mean) / std per component; zero-variance components map to 0.
inline std::vector<double> apply_scaler(const ScalerStats& s, std::span<const double> x) {
  if (x.size() != s.dim()) {
    throw DimensionMismatch("expected " + std::to_string(s.dim()) + " features, got " +
                            std::to_string(x.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = s.std[k] > 0.0 ? (x[k] - s.mean[k]) / s.std[k] : 0.0;
  }
  return out;
}

struct TrainConfig {
  double c = 1.0;
  double tol = 1e-3;
  int max_passes = 0;  // 0: 10 * n
  double eps = 1e-8;

  void validate() const {
    if (!(c > 0.0)) throw InvalidConfig("svm C must be > 0");
    if (!(tol > 0.0)) throw InvalidConfig("svm tol must be > 0");
    if (max_passes < 0) throw InvalidConfig("svm max_passes must be >= 0");
    if (!(eps > 0.0)) throw InvalidConfig("svm eps must be > 0");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct SvmModel {
  std::vector<std::vector<double>> support_vectors;  // in scaled feature space
  std::vector<double> coeffs;                        // alpha_i * y_i
  double bias = 0.0;
  KernelSpec kernel;  // gamma resolved
  ScalerStats scaler;
  double c = 1.0;
  std::vector<std::string> feature_names;
  bool converged = true;
  int passes = 0;

  std::size_t dim() const noexcept { return scaler.dim(); }
};

/// Raw dual solution, kept separate from the model for verification.
struct SmoSolution {
  std::vector<double> alphas;
  double bias = 0.0;
  bool converged = false;
  int passes = 0;
};

namespace detail {

inline std::vector<double> gram_matrix(std::span<const Sample> data, const KernelSpec& k) {
  const std::size_t n = data.size();
  std::vector<double> g(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel_eval(k, data[i].x, data[j].x);
      g[i * n + j] = v;
      g[j * n + i] = v;
    }
  }
  return g;
}

inline void check_dataset(std::span<const Sample> data) {
  if (data.empty()) throw EmptyDataset("no training samples");
  const std::size_t m = data.front().x.size();
  bool pos = false, neg = false;
  for (const auto& s : data) {
    if (s.x.size() != m) throw DimensionMismatch("inconsistent sample dimensions");
    if (s.y != 1 && s.y != -1) throw InvalidConfig("labels must be +1 or -1");
    for (double v : s.x) {
      if (!std::isfinite(v)) throw InvalidConfig("non-finite feature value");
    }
    (s.y > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) throw SingleClass("training data contains a single class");
}

// Bias from the free support vectors' average, or the midpoint of the KKT
// feasible interval when every alpha sits at a bound. grad[i] = sum_j a_j y_j K_ij.
inline double kkt_bias(std::span<const Sample> data, std::span<const double> alphas,
                       std::span<const double> grad, double c, double eps) {
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lb = -std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double val = data[i].y - grad[i];
    const double a = alphas[i];
    if (a > eps && a < c - eps) {
      free_sum += val;
      ++free_count;
    } else if (a <= eps) {
      if (data[i].y > 0) lb = std::max(lb, val); else ub = std::min(ub, val);
    } else {
      if (data[i].y > 0) ub = std::min(ub, val); else lb = std::max(lb, val);
    }
  }
  if (free_count > 0) return free_sum / static_cast<double>(free_count);
  const bool has_lb = std::isfinite(lb), has_ub = std::isfinite(ub);
  if (has_lb && has_ub) return 0.5 * (lb + ub);
  if (has_lb) return lb;
  if (has_ub) return ub;
  return 0.0;
}

}  // namespace detail

/// Decision values f(x_i) = sum_j a_j y_j K_ij + b over the training set.
inline std::vector<double> training_decisions(std::span<const Sample> data, const KernelSpec& kernel,
                                              std::span<const double> alphas, double bias) {
  std::vector<double> f(data.size(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (alphas[j] != 0.0) s += alphas[j] * data[j].y * kernel_eval(kernel, data[j].x, data[i].x);
    }
    f[i] = s + bias;
  }
  return f;
}

/// Bias for an arbitrary alpha vector by the same rule SMO uses at the end.
inline double bias_for(std::span<const Sample> data, const KernelSpec& kernel,
                       std::span<const double> alphas, double c, double eps = 1e-8) {
  const auto g = training_decisions(data, kernel, alphas, 0.0);
  return detail::kkt_bias(data, alphas, g, c, eps);
}

/// Dual SMO on already-scaled data. The kernel must have gamma resolved.
inline SmoSolution smo_solve(std::span<const Sample> data, const KernelSpec& kernel,
                             const TrainConfig& cfg) {
  cfg.validate();
  kernel.validate();
  detail::check_dataset(data);
  const std::size_t n = data.size();
  const double C = cfg.c;
  const double tol = cfg.tol;
  const double eps = cfg.eps;
  const int max_passes = cfg.max_passes > 0 ? cfg.max_passes : static_cast<int>(10 * n);

  const std::vector<double> K = detail::gram_matrix(data, kernel);
  const auto Kat = [&](std::size_t i, std::size_t j) { return K[i * n + j]; };
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data[i].y;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, 0.0);  // sum_j a_j y_j K_ij
  double b = 0.0;
  std::vector<double> err(n);
  const auto refresh_errors = [&] {
    for (std::size_t i = 0; i < n; ++i) err[i] = grad[i] + b - y[i];
  };
  refresh_errors();

  const auto violates = [&](std::size_t i) {
    const double r = y[i] * err[i];
    return (r < -tol && alpha[i] < C) || (r > tol && alpha[i] > 0.0);
  };

  const auto take_step = [&](std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha[i1], a2 = alpha[i2];
    const double y1 = y[i1], y2 = y[i2];
    const double e1 = err[i1], e2 = err[i2];
    const double s = y1 * y2;
    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(C, C + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - C);
      hi = std::min(C, a1 + a2);
    }
    if (lo >= hi) return false;
    const double k11 = Kat(i1, i1), k12 = Kat(i1, i2), k22 = Kat(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2n;
    if (eta > 0.0) {
      a2n = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective restricted to the segment, evaluated at both ends.
      // Negated dual restricted to the segment (minimized), with f = g + b.
      const double f1 = y1 * (e1 - b) - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * (e2 - b) - s * a1 * k12 - a2 * k22;
      const double l1 = a1 + s * (a2 - lo);
      const double h1 = a1 + s * (a2 - hi);
      const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
      const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (obj_lo < obj_hi - eps) a2n = lo;
      else if (obj_lo > obj_hi + eps) a2n = hi;
      else return false;
    }
    if (a2n < eps) a2n = 0.0;
    else if (a2n > C - eps) a2n = C;
    if (std::abs(a2n - a2) < eps * (a2n + a2 + eps)) return false;
    double a1n = a1 + s * (a2 - a2n);
    if (a1n < eps) a1n = 0.0;
    else if (a1n > C - eps) a1n = C;

    const double d1 = y1 * (a1n - a1);
    const double d2 = y2 * (a2n - a2);
    const double b1 = b - e1 - d1 * k11 - d2 * k12;
    const double b2 = b - e2 - d1 * k12 - d2 * k22;
    double bn;
    if (a1n > 0.0 && a1n < C) bn = b1;
    else if (a2n > 0.0 && a2n < C) bn = b2;
    else bn = 0.5 * (b1 + b2);

    alpha[i1] = a1n;
    alpha[i2] = a2n;
    b = bn;
    for (std::size_t k = 0; k < n; ++k) {
      grad[k] += d1 * Kat(i1, k) + d2 * Kat(i2, k);
      err[k] = grad[k] + b - y[k];
    }
    return true;
  };

  const auto examine = [&](std::size_t i) {
    std::size_t best = i;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double gap = std::abs(err[i] - err[j]);
      if (gap > best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (take_step(i, best)) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != best && take_step(i, j)) return true;
    }
    return false;
  };

  const auto any_violator = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      if (violates(i)) return true;
    }
    return false;
  };

  SmoSolution sol;
  int stalled = 0;
  while (sol.passes < max_passes) {
    ++sol.passes;
    bool saw_violator = false;
    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!violates(i)) continue;
      saw_violator = true;
      if (examine(i)) ++changed;
    }
    if (changed > 0) {
      stalled = 0;
      continue;
    }
    // Settle the bias by the final rule and re-check against it.
    b = detail::kkt_bias(data, alpha, grad, C, eps);
    refresh_errors();
    if (!any_violator()) {
      sol.converged = true;
      break;
    }
    if (saw_violator && ++stalled > 1) break;  // no pair makes progress
  }
  if (!sol.converged) {
    b = detail::kkt_bias(data, alpha, grad, C, eps);
    refresh_errors();
    sol.converged = !any_violator();
  }
  sol.alphas = std::move(alpha);
  sol.bias = b;
  return sol;
}

/// SMO on scaled data; the returned model carries `scaler` (identity by default).
inline SvmModel smo_train(std::span<const Sample> data, const KernelSpec& kernel, const TrainConfig& cfg,
                          std::optional<ScalerStats> scaler = std::nullopt,
                          std::vector<std::string> feature_names = {}) {
  detail::check_dataset(data);
  const std::size_t m = data.front().x.size();
  const KernelSpec k = kernel.resolved(m);
  const SmoSolution sol = smo_solve(data, k, cfg);

  SvmModel model;
  model.kernel = k;
  model.c = cfg.c;
  model.bias = sol.bias;
  model.converged = sol.converged;
  model.passes = sol.passes;
  model.scaler = scaler ? *scaler : ScalerStats::identity(m);
  if (model.scaler.dim() != m) throw DimensionMismatch("scaler dimension does not match samples");
  model.feature_names = std::move(feature_names);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (sol.alphas[i] > cfg.eps) {
      model.support_vectors.push_back(data[i].x);
      model.coeffs.push_back(sol.alphas[i] * data[i].y);
    }
  }
  return model;
}

/// Fits the scaler on raw samples, scales them and trains.
inline SvmModel train_svm(std::span<const Sample> raw, const KernelSpec& kernel, const TrainConfig& cfg,
                          std::vector<std::string> feature_names = {}) {
  detail::check_dataset(raw);
  ScalerStats scaler = fit_scaler(raw);
  std::vector<Sample> scaled;
  scaled.reserve(raw.size());
  for (const auto& s : raw) scaled.push_back({apply_scaler(scaler, s.x), s.y});
  return smo_train(scaled, kernel, cfg, std::move(scaler), std::move(feature_names));
}

/// f(x) = sum_i coeff_i K(sv_i, scale(x)) + b on a raw feature vector.
inline double decision_value(const SvmModel& model, std::span<const double> x) {
  const auto z = apply_scaler(model.scaler, x);
  double s = 0.0;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    s += model.coeffs[i] * kernel_eval(model.kernel, model.support_vectors[i], z);
  }
  return s + model.bias;
}

/// sign(f) with sign(0) = +1.
inline int predict(const SvmModel& model, std::span<const double> x) {
  return decision_value(model, x) >= 0.0 ? 1 : -1;
}

inline double dual_objective(std::span<const Sample> data, const KernelSpec& kernel,
                             std::span<const double> alphas) {
  if (alphas.size() != data.size()) throw DimensionMismatch("alpha count does not match data");
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    lin += alphas[i];
    if (alphas[i] == 0.0) continue;
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (alphas[j] == 0.0) continue;
      quad += alphas[i] * alphas[j] * data[i].y * data[j].y * kernel_eval(kernel, data[i].x, data[j].x);
    }
  }
  return lin - 0.5 * quad;
}

}  // namespace mammo
