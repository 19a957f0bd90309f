#include <gtest/gtest.h>

#include <random>

#include "mammo/svm.hpp"
#include "mammo/svm_io.hpp"
#include "mammo/svm_oracle.hpp"
#include "svm_checks.hpp"

using namespace mammo;

namespace {

KernelSpec linear() {
  KernelSpec k;
  k.kind = KernelKind::linear;
  k.gamma = 1.0;
  return k;
}

std::vector<Sample> two_points() { return {{{-1.0}, -1}, {{1.0}, 1}}; }

std::vector<Sample> xor_data() {
  return {{{0, 0}, -1}, {{1, 1}, -1}, {{0, 1}, 1}, {{1, 0}, 1}};
}

}  // namespace

TEST(Kernel, Examples) {
  const std::vector<double> a{1, 2}, b{3, 4};
  EXPECT_EQ(kernel_eval(linear(), a, b), 11.0);
  KernelSpec rbf;
  rbf.gamma = 0.5;
  EXPECT_EQ(kernel_eval(rbf, a, a), 1.0);
  EXPECT_NEAR(kernel_eval(rbf, std::vector<double>{0, 0}, std::vector<double>{1, 1}), std::exp(-1.0), 1e-12);
  KernelSpec sig_rbf;
  sig_rbf.sigma = 1.0;
  EXPECT_NEAR(sig_rbf.effective_gamma(), 0.5, 0.0);
  KernelSpec poly;
  poly.kind = KernelKind::polynomial;
  poly.gamma = 1.0;
  poly.coef = 1.0;
  poly.degree = 2;
  EXPECT_EQ(kernel_eval(poly, std::vector<double>{1}, std::vector<double>{1}), 4.0);
  KernelSpec sig;
  sig.kind = KernelKind::sigmoid;
  sig.gamma = 1.0;
  sig.coef = -2.0;
  EXPECT_EQ(kernel_eval(sig, std::vector<double>{1}, std::vector<double>{2}), 0.0);
  EXPECT_THROW(kernel_eval(linear(), a, std::vector<double>{1}), DimensionMismatch);
}

TEST(Kernel, Validation) {
  KernelSpec k;
  k.gamma = 0.5;
  k.sigma = 1.0;
  EXPECT_NO_THROW(k.validate());
  k.sigma = 2.0;
  EXPECT_THROW(k.validate(), InvalidKernel);
  k = {};
  k.gamma = -1;
  EXPECT_THROW(k.validate(), InvalidKernel);
  EXPECT_EQ(*KernelSpec{}.resolved(4).gamma, 0.25);
  EXPECT_THROW(parse_kernel_kind("cubic"), InvalidKernel);
}

TEST(Kernel, Symmetry) {
  std::mt19937_64 rng(83);
  std::normal_distribution<double> g;
  for (int t = 0; t < 40; ++t) {
    const auto k = svmcheck::random_kernel(rng, t);
    std::vector<double> x(3), y(3);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng);
    EXPECT_NEAR(kernel_eval(k, x, y), kernel_eval(k, y, x), 1e-12);
    if (k.kind == KernelKind::rbf) {
      EXPECT_GT(kernel_eval(k, x, y), 0.0);
      EXPECT_LE(kernel_eval(k, x, y), 1.0);
    }
  }
}

TEST(Scaler, Examples) {
  const std::vector<Sample> d{{{0.0, 5.0}, 1}, {{2.0, 5.0}, -1}};
  const auto s = fit_scaler(d);
  EXPECT_EQ(s.mean, (std::vector<double>{1.0, 5.0}));
  EXPECT_EQ(s.std, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(apply_scaler(s, std::vector<double>{0.0, 9.0}), (std::vector<double>{-1.0, 0.0}));
  EXPECT_EQ(apply_scaler(s, s.mean), (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(fit_scaler(std::vector<Sample>{}), EmptyDataset);
}

TEST(Smo, TwoPointAnalytic) {
  TrainConfig cfg;
  cfg.c = 10;
  const auto d = two_points();
  const auto sol = smo_solve(d, linear(), cfg);
  EXPECT_NEAR(sol.alphas[0], 0.5, 1e-6);
  EXPECT_NEAR(sol.alphas[1], 0.5, 1e-6);
  EXPECT_NEAR(sol.bias, 0.0, 1e-6);
  EXPECT_TRUE(sol.converged);
  const auto m = smo_train(d, linear(), cfg);
  EXPECT_EQ(m.support_vectors.size(), 2u);
  EXPECT_NEAR(decision_value(m, std::vector<double>{0.5}), 0.5, 1e-6);
  EXPECT_EQ(predict(m, std::vector<double>{0.0}), 1);
  EXPECT_NEAR(dual_objective(d, linear(), std::vector<double>{0.5, 0.5}), 0.5, 1e-12);
  EXPECT_EQ(dual_objective(d, linear(), std::vector<double>{0, 0}), 0.0);
}

TEST(Smo, Xor) {
  KernelSpec k;
  k.gamma = 1.0;
  TrainConfig cfg;
  cfg.c = 10;
  const auto d = xor_data();
  const auto m = smo_train(d, k, cfg);
  for (const auto& s : d) EXPECT_EQ(predict(m, s.x), s.y);
}

TEST(Smo, Errors) {
  const std::vector<Sample> same{{{1.0}, 1}, {{2.0}, 1}};
  EXPECT_THROW(smo_train(same, linear(), {}), SingleClass);
  EXPECT_THROW(smo_train(std::vector<Sample>{}, linear(), {}), EmptyDataset);
  const std::vector<Sample> ragged{{{1.0}, 1}, {{2.0, 3.0}, -1}};
  EXPECT_THROW(smo_train(ragged, linear(), {}), DimensionMismatch);
}

TEST(Smo, OracleAgreementAndKkt) {
  std::mt19937_64 rng(89);
  for (int t = 0; t < 16; ++t) {
    const int n = 2 + t % 4, m = 1 + t % 3;
    const auto d = svmcheck::random_dataset(rng, n, m);
    const auto k = svmcheck::random_kernel(rng, t);
    TrainConfig cfg;
    cfg.c = 1.0 + t % 3;
    const int g = svmcheck::grid_steps_for(n);
    const auto sol = smo_solve(d, k, cfg);
    const auto grid = brute_force_qp(d, k, cfg.c, g);
    EXPECT_GE(svmcheck::objective(d, k, sol.alphas), svmcheck::objective(d, k, grid) - n * cfg.c / g);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_GE(sol.alphas[i], 0.0);
      EXPECT_LE(sol.alphas[i], cfg.c);
      sum += sol.alphas[i] * d[i].y;
    }
    EXPECT_LE(std::abs(sum), 1e-6);
    if (sol.converged) {
      EXPECT_TRUE(svmcheck::kkt_holds(d, k, sol.alphas, sol.bias, cfg.c, cfg.tol));
    }
    EXPECT_NEAR(dual_objective(d, k, sol.alphas), svmcheck::objective(d, k, sol.alphas), 1e-9);
  }
}

TEST(Smo, OracleTwoPoint) {
  const auto a = brute_force_qp(two_points(), linear(), 10.0, 20);
  EXPECT_NEAR(a[0], 0.5, 0.5);
  EXPECT_NEAR(a[1], 0.5, 0.5);
  std::vector<Sample> seven(7, Sample{{0.0}, 1});
  EXPECT_THROW(brute_force_qp(seven, linear(), 1.0, 4), TooLarge);
}

TEST(Smo, Deterministic) {
  std::mt19937_64 rng(97);
  const auto d = svmcheck::random_dataset(rng, 40, 3);
  const auto a = train_svm(d, {}, {});
  const auto b = train_svm(d, {}, {});
  EXPECT_EQ(save_model(a), save_model(b));
}

TEST(Smo, LabelSymmetry) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 10; ++t) {
    auto d = svmcheck::random_dataset(rng, 12, 2);
    KernelSpec k;
    k.gamma = 0.7;
    const auto a = train_svm(d, k, {});
    for (auto& s : d) s.y = -s.y;
    const auto b = train_svm(d, k, {});
    for (const auto& s : d) EXPECT_NEAR(decision_value(a, s.x), -decision_value(b, s.x), 1e-9);
  }
}

TEST(Smo, ModelInvariants) {
  std::mt19937_64 rng(103);
  const auto d = svmcheck::random_dataset(rng, 60, 3);
  TrainConfig cfg;
  cfg.c = 2.0;
  const auto m = train_svm(d, {}, cfg);
  ASSERT_FALSE(m.support_vectors.empty());
  double sum = 0.0;
  for (double c : m.coeffs) {
    EXPECT_LE(std::abs(c), cfg.c + 1e-9);
    sum += c;
  }
  EXPECT_LE(std::abs(sum), 1e-6);
}

TEST(ModelIo, RoundTripBitExact) {
  std::mt19937_64 rng(107);
  const auto d = svmcheck::random_dataset(rng, 30, 4);
  KernelSpec k;
  k.kind = KernelKind::polynomial;
  k.degree = 2;
  const auto m = train_svm(d, k, {}, {"a", "b", "c", "d"});
  const auto text = save_model(m);
  const auto back = load_model(text);
  EXPECT_EQ(save_model(back), text);
  EXPECT_EQ(back.feature_names, m.feature_names);
  std::normal_distribution<double> g(0, 3);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(4);
    for (auto& v : x) v = g(rng);
    EXPECT_EQ(decision_value(back, x), decision_value(m, x));
  }
}

TEST(ModelIo, Errors) {
  const auto text = save_model(smo_train(two_points(), linear(), {}));
  std::string v2 = text;
  v2.replace(v2.find("version 1"), 9, "version 2");
  EXPECT_THROW(load_model(v2), UnsupportedVersion);
  EXPECT_THROW(load_model(text.substr(0, text.size() / 2)), SchemaViolation);
  EXPECT_THROW(load_model("hello"), SchemaViolation);
  std::string bad = text;
  bad.replace(bad.find("bias "), 5, "bias x");
  EXPECT_THROW(load_model(bad), SchemaViolation);
}
