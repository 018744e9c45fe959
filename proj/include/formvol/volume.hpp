#pragma once

// Volume of the sublevel set {f <= 1} of a form of even degree d.
//
// The Monte Carlo estimators rely on the Laplace identity
//
//   v(f) = 1 / Gamma(1 + n/d) * integral exp(-f(x)) dx
//
// and on polar coordinates, v(f) = (1/n) integral_{S^{n-1}} f^{-n/d}.
// Infinite volume is a flag on the result, never an exception: callers such
// as the solvers treat it as an objective of +inf.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "formvol/formcore.hpp"
#include "formvol/matrix.hpp"
#include "formvol/random.hpp"

namespace formvol {

enum class VolumeMethod { kLaplace, kSpherical, kExact };

const char* to_string(VolumeMethod method);

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  VolumeMethod method = VolumeMethod::kLaplace;
  bool infinite = false;
};

// Volume of the unit ball, pi^{n/2} / Gamma(n/2 + 1).
double ball_volume(int n);

// Normalizing constant of the law exp(-kappa |x|^d):
// (Gamma(1 + n/d) / Gamma(1 + n/2))^{d/n} pi^{d/2}.
double kappa(int n, int d);

// Probability density exp(-kappa |x|^d) on R^n.
class GaussianLikeLaw {
 public:
  GaussianLikeLaw(int n, int d);

  int variables() const noexcept { return n_; }
  int degree() const noexcept { return d_; }
  double kappa() const noexcept { return kappa_; }

  double density(std::span<const double> x) const;

  // Uniform direction times radius r with kappa r^d ~ Gamma(n/d).
  void sample(CounterEngine& engine, std::span<double> out) const;

 private:
  int n_;
  int d_;
  double kappa_;
};

struct LaplaceOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  // First stream counter; disjoint offsets give independent sample sets
  // under the same seed.
  std::uint64_t offset = 0;
  // Scale s of the reference law exp(-s |x|^d). Zero selects the screened
  // minimum of f on the sphere, which bounds every weight by 1. Pass the
  // same value to compare estimates of nearby forms with common random
  // numbers.
  double reference_scale = 0.0;
  // Determinant-one map L; the estimator samples f(L y), which has the same
  // volume. Unset selects isotropic_transform(f). Pin it together with
  // reference_scale for common random numbers.
  std::optional<Matrix> transform;
  int screen_restarts = 32;
  int screen_iters = 200;
};

VolumeEstimate volume_laplace_mc(const Form& f, std::uint64_t samples, std::uint64_t seed);
VolumeEstimate volume_laplace_mc(const Form& f, const LaplaceOptions& options);

VolumeEstimate volume_spherical_mc(const Form& f, std::uint64_t samples, std::uint64_t seed);

// vol{x^t A x <= 1} = ball_volume(n) / sqrt(det A) for A positive definite.
double volume_quadratic_exact(const Matrix& a);

struct VolumeGradient {
  VolumeEstimate volume;
  std::vector<double> gradient;   // d v / d f_a, rescaled coordinates
  std::vector<double> std_error;  // per coordinate
  double reference_scale = 0.0;
  Matrix transform;
};

// Gradient of v in the rescaled coefficients, differentiated under the
// Laplace integral; uses exactly the sample stream of volume_laplace_mc.
VolumeGradient volume_gradient(const Form& f, std::uint64_t samples, std::uint64_t seed);
VolumeGradient volume_gradient(const Form& f, const LaplaceOptions& options);

// Determinant-one L making f(L y) closer to isotropic: L is proportional to
// Q^{-1/2}, Q the Hessian of f averaged against a Gaussian. Exact for
// quadratics. Identity when Q is within a factor 2 of a multiple of the
// identity or not positive definite.
Matrix isotropic_transform(const Form& f);

// Screened minimum of f on the sphere used as the automatic reference
// scale; zero means infinite volume (minima below 1e-12 ||f||_B count as
// zero).
double screened_reference_scale(const Form& f, const LaplaceOptions& options);

// Moment of x^alpha under exp(-kappa |x|^d), from the matching Gaussian
// moment. Zero whenever some alpha_i is odd.
double gaussian_like_moment(std::span<const int> alpha, int n, int d);

struct ProbabilityNormalization {
  double c = 0.0;
  double std_error = 0.0;
  Form g = Form(1, 0);  // c * f, so that integral exp(-g) = 1
};

// c = (Gamma(1 + n/d) v(f))^{d/n}, using v(c f) = c^{-n/d} v(f).
ProbabilityNormalization normalize_to_probability(const Form& f, double volume, double volume_std_error = 0.0);
ProbabilityNormalization normalize_to_probability(const Form& f, const VolumeEstimate& volume);

}  // namespace formvol
