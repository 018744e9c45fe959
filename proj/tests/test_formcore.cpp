#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "formvol/formcore.hpp"
#include "formvol/random.hpp"
#include "formvol/special.hpp"
#include "test_util.hpp"

using namespace formvol;

namespace {

std::vector<double> random_coeffs(std::size_t size, std::uint64_t seed) {
  CounterEngine e(seed, 0);
  std::vector<double> c(size);
  fill_normal(e, c);
  return c;
}

// Straight evaluation from monomial coefficients.
double naive_eval(int n, int d, const std::vector<double>& mono, const std::vector<double>& x) {
  const auto& t = multi_index_table(n, d);
  double s = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    double term = mono[k];
    for (int i = 0; i < n; ++i) term *= std::pow(x[i], t[k][i]);
    s += term;
  }
  return s;
}

}  // namespace

TEST(Combinatorics, Binomial) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(10, 0), 1u);
  EXPECT_EQ(binomial(3, 5), 0u);
  EXPECT_EQ(binomial(60, 30), 118264581564861424ull);
  EXPECT_FV_ERROR(binomial(200, 100), ErrorCode::kCapacity);
}

TEST(Combinatorics, Multinomial) {
  const int a[] = {2, 1, 1};
  EXPECT_DOUBLE_EQ(multinomial(a), 12.0);
  const int b[] = {0, 4};
  EXPECT_DOUBLE_EQ(multinomial(b), 1.0);
  const int c[] = {3, 3};
  EXPECT_DOUBLE_EQ(multinomial(c), 20.0);
}

TEST(MultiIndexTable, CanonicalOrder) {
  const auto& t = multi_index_table(2, 2);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0][0], 2);
  EXPECT_EQ(t[1][0], 1);
  EXPECT_EQ(t[1][1], 1);
  EXPECT_EQ(t[2][1], 2);

  const auto& u = multi_index_table(3, 2);
  const int expected[6][3] = {{2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  ASSERT_EQ(u.size(), 6u);
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(u[k][i], expected[k][i]);
}

TEST(MultiIndexTable, IndexRoundTrip) {
  for (int n = 1; n <= 5; ++n)
    for (int d = 0; d <= 7; ++d) {
      const auto& t = multi_index_table(n, d);
      EXPECT_EQ(t.size(), binomial(static_cast<std::size_t>(n + d - 1), static_cast<std::size_t>(d)));
      for (std::size_t k = 0; k < t.size(); ++k) EXPECT_EQ(t.index_of(t[k]), k);
    }
}

TEST(MultiIndexTable, SharedInstance) { EXPECT_EQ(&multi_index_table(3, 4), &multi_index_table(3, 4)); }

TEST(Form, ShapeChecks) {
  EXPECT_FV_ERROR(Form(2, 2, std::vector<double>{1.0, 2.0}), ErrorCode::kShape);
  Form a(2, 2), b(2, 4);
  EXPECT_FV_ERROR(a += b, ErrorCode::kShape);
  EXPECT_FV_ERROR(bombieri_product(a, b), ErrorCode::kShape);
}

TEST(Form, BasisRoundTrip) {
  const auto mono = random_coeffs(multi_index_table(3, 4).size(), 5);
  const Form f = rescaled_from_monomial(3, 4, mono);
  const auto back = monomial_from_rescaled(f);
  for (std::size_t i = 0; i < mono.size(); ++i) EXPECT_NEAR(back[i], mono[i], 1e-14);
}

TEST(Form, EvaluateMatchesNaive) {
  for (int n = 1; n <= 4; ++n)
    for (int d = 0; d <= 6; ++d) {
      const auto mono = random_coeffs(multi_index_table(n, d).size(), 100 + n * 10 + d);
      const Form f = rescaled_from_monomial(n, d, mono);
      const auto x = random_coeffs(static_cast<std::size_t>(n), 7 + n + d);
      const double want = naive_eval(n, d, mono, x);
      EXPECT_NEAR(evaluate(f, x), want, 1e-12 * std::max(1.0, std::abs(want)));
      EXPECT_NEAR(FormEvaluator(f)(x), want, 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST(Form, BallFormValues) {
  const Form b = ball_form(3, 4);
  const double x[] = {0.3, -1.2, 0.7};
  const double r2 = 0.09 + 1.44 + 0.49;
  EXPECT_NEAR(evaluate(b, x), r2 * r2, 1e-13);
  EXPECT_FV_ERROR(ball_form(2, 3), ErrorCode::kDomain);
  const Form p = powers_form(2, 3);
  const double y[] = {2.0, -1.0};
  EXPECT_DOUBLE_EQ(evaluate(p, y), 7.0);
}

TEST(Bombieri, BallNormClosedForm) {
  for (int n = 1; n <= 6; ++n)
    for (int d = 2; d <= 10; d += 2) {
      long double prod = 1.0L;
      for (int i = 0; i < d / 2; ++i) prod *= static_cast<long double>(2 * i + n) / (2 * i + 1);
      const double want = std::sqrt(static_cast<double>(prod));
      EXPECT_LE(rel_err(bombieri_norm(ball_form(n, d)), want), 1e-12) << n << " " << d;
      EXPECT_LE(rel_err(bombieri_norm_ball_exact(n, d), want), 1e-12);
      EXPECT_LE(rel_err(nuclear_norm_ball(n, d), want * want), 1e-12);
    }
  // ||(x^2 + y^2 + z^2)^2||_B^2 = 3/1 * 5/3 = 5
  EXPECT_NEAR(bombieri_norm(ball_form(3, 4)), std::sqrt(5.0), 1e-14);
}

TEST(Bombieri, ReproducingProperty) {
  const auto c = random_coeffs(multi_index_table(3, 5).size(), 17);
  const Form f(3, 5, c);
  const double y[] = {0.4, -0.9, 1.3};
  EXPECT_NEAR(bombieri_product(f, power_form(y, 5)), evaluate(f, y), 1e-12);
}

TEST(Bombieri, OrthogonalInvariance) {
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 3;
    const int d = 2 + trial % 4;
    const Form f(n, d, random_coeffs(multi_index_table(n, d).size(), 50 + trial));
    const auto rho = OrthogonalMatrix::random(n, 900 + trial);
    const Form g = apply_orthogonal(f, rho);
    EXPECT_LE(rel_err(bombieri_norm(g), bombieri_norm(f)), 1e-12);
    // (rho^* f)(rho x) = f(x)
    const auto x = random_coeffs(static_cast<std::size_t>(n), 3 + trial);
    const auto rx = rho.matrix().apply(x);
    EXPECT_NEAR(evaluate(g, rx), evaluate(f, x), 1e-10 * std::max(1.0, std::abs(evaluate(f, x))));
  }
}

TEST(Bombieri, BallIsInvariant) {
  const Form b = ball_form(3, 6);
  const Form g = apply_orthogonal(b, OrthogonalMatrix::random(3, 4));
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(g[i], b[i], 1e-12);
}

TEST(ComposeLinear, IdentityIsExact) {
  const Form f(3, 4, random_coeffs(multi_index_table(3, 4).size(), 2));
  const Form g = compose_linear(f, Matrix::identity(3));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g[i], f[i]);
}

TEST(ComposeLinear, GeneralMatrix) {
  const Form f(2, 3, random_coeffs(multi_index_table(2, 3).size(), 8));
  const Matrix m{{1.0, 2.0}, {-0.5, 3.0}};
  const Form g = compose_linear(f, m);
  const std::vector<double> x{0.7, -0.2};
  EXPECT_NEAR(evaluate(g, x), evaluate(f, m.apply(x)), 1e-12);
}

TEST(OrthogonalMatrix, Validation) {
  EXPECT_FV_ERROR(OrthogonalMatrix(Matrix{{1.0, 0.1}, {0.0, 1.0}}), ErrorCode::kDomain);
  const auto q = OrthogonalMatrix::random(4, 11);
  EXPECT_LE(orthogonality_defect(q.matrix()), 1e-13);
  EXPECT_EQ(OrthogonalMatrix::random(4, 11).matrix().data()[5], q.matrix().data()[5]);
}

TEST(Differentiate, MatchesFiniteDifferences) {
  const Form f(3, 4, random_coeffs(multi_index_table(3, 4).size(), 21));
  const std::vector<double> x{0.3, 0.5, -0.8};
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (evaluate(f, xp) - evaluate(f, xm)) / (2 * h);
    EXPECT_NEAR(evaluate(differentiate(f, i), x), fd, 1e-7);
  }
  EXPECT_FV_ERROR(differentiate(Form(2, 0), 0), ErrorCode::kDomain);
  EXPECT_FV_ERROR(differentiate(f, 3), ErrorCode::kShape);
}

TEST(GradientEvaluator, ValueAndGradient) {
  const Form f(2, 5, random_coeffs(multi_index_table(2, 5).size(), 23));
  GradientEvaluator ge(f);
  const std::vector<double> x{0.9, -0.4};
  std::vector<double> g(2);
  EXPECT_NEAR(ge.value_and_gradient(x, g), evaluate(f, x), 1e-13);
  EXPECT_NEAR(g[0], evaluate(differentiate(f, 0), x), 1e-12);
  EXPECT_NEAR(g[1], evaluate(differentiate(f, 1), x), 1e-12);
}

TEST(Nuclear, UpperBoundFromDecomposition) {
  // x^4 + y^4 is its own decomposition.
  const Form p = powers_form(2, 4);
  std::vector<PowerTerm> terms{{1.0, {1.0, 0.0}}, {1.0, {0.0, 1.0}}};
  EXPECT_DOUBLE_EQ(nuclear_upper_bound(terms, p), 2.0);
  // Unit powers have Bombieri norm 1, so any certificate dominates ||f||_B.
  EXPECT_GE(2.0, bombieri_norm(p));
}

TEST(Nuclear, RejectsBadCertificates) {
  const Form p = powers_form(2, 4);
  std::vector<PowerTerm> wrong{{1.0, {1.0, 0.0}}};
  EXPECT_FV_ERROR(nuclear_upper_bound(wrong, p), ErrorCode::kInvalidCertificate);
  std::vector<PowerTerm> not_unit{{1.0, {2.0, 0.0}}, {1.0, {0.0, 1.0}}};
  EXPECT_FV_ERROR(nuclear_upper_bound(not_unit, p), ErrorCode::kInvalidCertificate);
}

TEST(Special, GammaAgreesWithLibm) {
  for (double x : {0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.75, 7.0, 10.5, 30.25, 49.9, 55.5, 120.0, 170.5})
    EXPECT_LE(rel_err(gamma_fn(x), std::tgamma(x)), 1e-13) << x;
  for (double x : {-0.5, -1.5, -2.25}) EXPECT_LE(rel_err(gamma_fn(x), std::tgamma(x)), 1e-12) << x;
  EXPECT_TRUE(std::isinf(gamma_fn(200.0)));
  EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-15);
  for (double x : {0.5, 3.0, 20.0, 300.0}) EXPECT_NEAR(log_gamma_fn(x), std::lgamma(x), 1e-12 * std::max(1.0, std::lgamma(x)));
}

TEST(Random, CounterStreamsAreReproducible) {
  CounterEngine a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
}

TEST(Random, SphereSamplerUnitAndIndexed) {
  SphereSampler s(3, 99);
  std::vector<double> p(3), q(3);
  for (std::uint64_t k = 0; k < 50; ++k) {
    s.point_at(k, p);
    double r = 0.0;
    for (double v : p) r += v * v;
    EXPECT_NEAR(r, 1.0, 1e-14);
  }
  s.point_at(10, p);
  SphereSampler t(3, 99, 10);
  t.next(q);
  EXPECT_EQ(p, q);
}
