#pragma once

// Model file: a line-oriented text document. Reals are written with 17
// significant digits so a save/load cycle reproduces every stored double.
//
//   mammo-svm-model
//   version 1
//   kernel <linear|polynomial|rbf|sigmoid>
//   gamma <real>
//   coef <real>
//   degree <int>
//   c <real>
//   bias <real>
//   converged <0|1>
//   passes <int>
//   feature_names <m> <name>...
//   scaler_mean <m> <real>...
//   scaler_std <m> <real>...
//   support_vectors <k> <m>
//   <m reals>            (k lines)
//   coeffs <k> <real>...
//   end

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/svm.hpp"

namespace mammo {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class TokenReader {
 public:
  explicit TokenReader(const std::string& text) : in_(text) {}

  std::string word(const char* what) {
    std::string w;
    if (!(in_ >> w)) throw SchemaViolation(std::string("unexpected end of document, expected ") + what);
    return w;
  }

  void expect(const std::string& key) {
    const auto w = word(key.c_str());
    if (w != key) throw SchemaViolation("expected '" + key + "', found '" + w + "'");
  }

  double real(const char* what) {
    const auto w = word(what);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size() || !std::isfinite(v)) {
      throw SchemaViolation(std::string("bad number for ") + what + ": '" + w + "'");
    }
    return v;
  }

  long long integer(const char* what) {
    const auto w = word(what);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      throw SchemaViolation(std::string("bad integer for ") + what + ": '" + w + "'");
    }
  }

  std::size_t count(const char* what) {
    const long long v = integer(what);
    if (v < 0 || v > (1LL << 28)) throw SchemaViolation(std::string("bad count for ") + what);
    return static_cast<std::size_t>(v);
  }

  std::vector<double> reals(const char* what, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = real(what);
    return v;
  }

 private:
  std::istringstream in_;
};

}  // namespace detail

inline std::string save_model(const SvmModel& m) {
  std::ostringstream out;
  const auto row = [&](const char* key, const std::vector<double>& v) {
    out << key << ' ' << v.size();
    for (double x : v) out << ' ' << detail::fmt17(x);
    out << '\n';
  };
  out << "mammo-svm-model\n";
  out << "version " << kModelFormatVersion << '\n';
  out << "kernel " << kernel_name(m.kernel.kind) << '\n';
  out << "gamma " << detail::fmt17(m.kernel.effective_gamma()) << '\n';
  out << "coef " << detail::fmt17(m.kernel.coef) << '\n';
  out << "degree " << m.kernel.degree << '\n';
  out << "c " << detail::fmt17(m.c) << '\n';
  out << "bias " << detail::fmt17(m.bias) << '\n';
  out << "converged " << (m.converged ? 1 : 0) << '\n';
  out << "passes " << m.passes << '\n';
  out << "feature_names " << m.feature_names.size();
  for (const auto& n : m.feature_names) out << ' ' << n;
  out << '\n';
  row("scaler_mean", m.scaler.mean);
  row("scaler_std", m.scaler.std);
  out << "support_vectors " << m.support_vectors.size() << ' ' << m.dim() << '\n';
  for (const auto& sv : m.support_vectors) {
    for (std::size_t i = 0; i < sv.size(); ++i) out << (i ? " " : "") << detail::fmt17(sv[i]);
    out << '\n';
  }
  row("coeffs", m.coeffs);
  out << "end\n";
  return out.str();
}

inline SvmModel load_model(const std::string& text) {
  detail::TokenReader in(text);
  in.expect("mammo-svm-model");
  in.expect("version");
  const long long version = in.integer("version");
  if (version != kModelFormatVersion) {
    throw UnsupportedVersion("model format version " + std::to_string(version) +
                             " (supported: " + std::to_string(kModelFormatVersion) + ")");
  }
  SvmModel m;
  in.expect("kernel");
  try {
    m.kernel.kind = parse_kernel_kind(in.word("kernel kind"));
  } catch (const InvalidKernel& e) {
    throw SchemaViolation(e.what());
  }
  in.expect("gamma");
  m.kernel.gamma = in.real("gamma");
  in.expect("coef");
  m.kernel.coef = in.real("coef");
  in.expect("degree");
  m.kernel.degree = static_cast<int>(in.integer("degree"));
  in.expect("c");
  m.c = in.real("c");
  in.expect("bias");
  m.bias = in.real("bias");
  in.expect("converged");
  m.converged = in.integer("converged") != 0;
  in.expect("passes");
  m.passes = static_cast<int>(in.integer("passes"));

  in.expect("feature_names");
  const std::size_t nf = in.count("feature_names");
  for (std::size_t i = 0; i < nf; ++i) m.feature_names.push_back(in.word("feature name"));
  in.expect("scaler_mean");
  const std::size_t dim = in.count("scaler_mean");
  m.scaler.mean = in.reals("scaler_mean", dim);
  in.expect("scaler_std");
  if (in.count("scaler_std") != dim) throw SchemaViolation("scaler_std length differs from scaler_mean");
  m.scaler.std = in.reals("scaler_std", dim);
  if (nf != 0 && nf != dim) throw SchemaViolation("feature_names length differs from scaler dimension");

  in.expect("support_vectors");
  const std::size_t k = in.count("support_vectors");
  if (in.count("support vector dimension") != dim) {
    throw SchemaViolation("support vector dimension differs from scaler dimension");
  }
  m.support_vectors.reserve(k);
  for (std::size_t i = 0; i < k; ++i) m.support_vectors.push_back(in.reals("support vector", dim));
  in.expect("coeffs");
  if (in.count("coeffs") != k) throw SchemaViolation("coeff count differs from support vector count");
  m.coeffs = in.reals("coeffs", k);
  in.expect("end");
  try {
    m.kernel.validate();
  } catch (const InvalidKernel& e) {
    throw SchemaViolation(e.what());
  }
  return m;
}

}  // namespace mammo
