#include "formvol/norms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "formvol/errors.hpp"
#include "formvol/random.hpp"
#include "formvol/special.hpp"

namespace formvol {
namespace {

enum class Goal { kMaxAbs, kMin };

// Shared multistart search. The form is rescaled to unit Bombieri norm first
// so that |f| <= 1 on the sphere and the fixed step 0.1/d is meaningful for
// any input scale; the result is scaled back.
double sphere_search(const Form& f, int restarts, int iters, std::uint64_t seed, Goal goal) {
  if (restarts < 1) fail(ErrorCode::kDomain, "sphere search needs at least one restart");
  if (iters < 0) fail(ErrorCode::kDomain, "iteration count must be nonnegative");
  const int n = f.variables();
  const double scale = bombieri_norm(f);
  if (scale == 0.0) return 0.0;
  const GradientEvaluator eval(f * (1.0 / scale));
  const double step = f.degree() > 0 ? 0.1 / f.degree() : 0.0;

  auto objective = [goal](double v) { return goal == Goal::kMaxAbs ? std::abs(v) : v; };
  auto better = [goal](double a, double b) { return goal == Goal::kMaxAbs ? a > b : a < b; };

  SphereSampler starts(n, seed);
  std::vector<double> x(static_cast<std::size_t>(n)), g(static_cast<std::size_t>(n));
  double best = goal == Goal::kMaxAbs ? -1.0 : std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    starts.next(x);
    for (int it = 0;; ++it) {
      const double v = eval.value_and_gradient(x, g);
      if (!std::isfinite(v)) fail(ErrorCode::kNumeric, "non-finite form value on the sphere");
      if (better(objective(v), best)) best = objective(v);
      if (it == iters) break;
      const double sign = goal == Goal::kMaxAbs ? (v >= 0.0 ? 1.0 : -1.0) : -1.0;
      double radial = 0.0;
      for (int i = 0; i < n; ++i) radial += g[i] * x[i];
      double norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] += step * sign * (g[i] - radial * x[i]);
        norm2 += x[i] * x[i];
      }
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& xi : x) xi *= inv;
    }
  }
  return best * scale;
}

}  // namespace

double sphere_surface(int n) {
  if (n < 1) fail(ErrorCode::kDomain, "sphere dimension must be at least 1");
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / gamma_fn(half);
}

NormEstimate lp_sphere_norm(const Form& f, double p, std::uint64_t samples, std::uint64_t seed) {
  if (!(p >= 1.0)) fail(ErrorCode::kDomain, "L^p norm needs p >= 1");
  if (samples < 2) fail(ErrorCode::kDomain, "L^p estimate needs at least two samples");
  const int n = f.variables();
  const FormEvaluator eval(f);
  SphereSampler sampler(n, seed);
  std::vector<double> x(static_cast<std::size_t>(n));
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    sampler.next(x);
    const double y = std::pow(std::abs(eval(x)), p);
    if (!std::isfinite(y)) fail(ErrorCode::kNumeric, "non-finite |f|^p sample");
    // Welford
    const double delta = y - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (y - mean);
  }
  NormEstimate est;
  est.samples = samples;
  est.kind = NormEstimateKind::kLp;
  if (mean <= 0.0) return est;
  const double var = m2 / static_cast<double>(samples - 1);
  est.value = std::pow(sphere_surface(n) * mean, 1.0 / p);
  est.std_error = est.value / (p * mean) * std::sqrt(var / static_cast<double>(samples));
  return est;
}

double lp_norm_ball_exact(int n, double p) {
  if (!(p >= 1.0)) fail(ErrorCode::kDomain, "L^p norm needs p >= 1");
  return std::pow(sphere_surface(n), 1.0 / p);
}

NormEstimate sup_sphere_norm(const Form& f, int restarts, int iters, std::uint64_t seed) {
  NormEstimate est;
  est.value = sphere_search(f, restarts, iters, seed, Goal::kMaxAbs);
  est.kind = NormEstimateKind::kSup;
  est.samples = static_cast<std::uint64_t>(restarts);
  return est;
}

NormEstimate min_sphere(const Form& f, int restarts, int iters, std::uint64_t seed) {
  NormEstimate est;
  est.value = sphere_search(f, restarts, iters, seed, Goal::kMin);
  est.kind = NormEstimateKind::kMin;
  est.samples = static_cast<std::uint64_t>(restarts);
  return est;
}

}  // namespace formvol
