#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "formvol/norms.hpp"
#include "test_util.hpp"

using namespace formvol;

TEST(Sphere, Surface) {
  EXPECT_NEAR(sphere_surface(1), 2.0, 1e-14);
  EXPECT_NEAR(sphere_surface(2), 2 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_surface(3), 4 * std::numbers::pi, 1e-13);
}

TEST(Lp, BallIsExactAndUsesSurfaceMeasure) {
  for (int n = 1; n <= 4; ++n)
    for (double p : {1.0, 2.0, 3.5}) {
      const auto est = lp_sphere_norm(ball_form(n, 2), p, 2000, 3);
      const double want = lp_norm_ball_exact(n, p);
      EXPECT_NEAR(want, std::pow(sphere_surface(n), 1.0 / p), 1e-13);
      EXPECT_LE(rel_err(est.value, want), 1e-12);
    }
}

TEST(Lp, PowersFormWithinThreeSigma) {
  // ||x^2 - y^2||_2^2 on the circle = int cos^2(2t) dt = pi.
  const Form f = rescaled_from_monomial(2, 2, std::vector<double>{1.0, 0.0, -1.0});
  const auto est = lp_sphere_norm(f, 2.0, 200000, 9);
  EXPECT_GT(est.std_error, 0.0);
  EXPECT_LE(std::abs(est.value - std::sqrt(std::numbers::pi)), 3 * est.std_error);
}

TEST(Lp, Validation) {
  EXPECT_FV_ERROR(lp_sphere_norm(ball_form(2, 2), 0.5, 100, 1), ErrorCode::kDomain);
  EXPECT_FV_ERROR(lp_sphere_norm(ball_form(2, 2), 2.0, 0, 1), ErrorCode::kDomain);
}

TEST(Sup, KnownMaxima) {
  EXPECT_NEAR(sup_sphere_norm(powers_form(2, 4), 32, 200, 1).value, 1.0, 1e-10);
  // max of x^2 + 3 y^2 on the circle is 3.
  const Form q = rescaled_from_monomial(2, 2, std::vector<double>{1.0, 0.0, 3.0});
  EXPECT_NEAR(sup_sphere_norm(q, 32, 200, 1).value, 3.0, 1e-10);
  // |x y| peaks at 1/2.
  const Form xy = rescaled_from_monomial(2, 2, std::vector<double>{0.0, 1.0, 0.0});
  EXPECT_NEAR(sup_sphere_norm(xy, 32, 200, 1).value, 0.5, 1e-10);
}

TEST(Min, DetectsIndefinite) {
  const Form q = rescaled_from_monomial(2, 2, std::vector<double>{1.0, 0.0, -1.0});
  EXPECT_NEAR(min_sphere(q, 32, 200, 1).value, -1.0, 1e-10);
  EXPECT_NEAR(min_sphere(powers_form(2, 4), 32, 200, 1).value, 0.5, 1e-10);
  EXPECT_NEAR(min_sphere(powers_form(3, 4), 32, 200, 1).value, 1.0 / 3.0, 1e-10);
}
