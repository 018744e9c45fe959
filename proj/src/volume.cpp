#include "formvol/volume.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "formvol/errors.hpp"
#include "formvol/norms.hpp"
#include "formvol/sos.hpp"
#include "formvol/special.hpp"

namespace formvol {
namespace {

constexpr std::uint64_t kScreeningTag = 0x5C2EE4;
// Relative variance beyond which the importance weights are declared blown
// up; this catches forms that passed screening but are not positive.
constexpr double kBlowUpRatio = 1e6;
// Sphere minima below this fraction of the Bombieri norm are treated as
// zeros: descent into an even-order zero stalls at roughly (1e-10)^2.
constexpr double kZeroMinimum = 1e-12;

double screened_minimum(const Form& f, int restarts, int iters, std::uint64_t seed) {
  const double m = min_sphere(f, restarts, iters, derive_seed(seed, kScreeningTag)).value;
  return m > kZeroMinimum * bombieri_norm(f) ? m : 0.0;
}

void require_positive_even(int d) {
  if (d <= 0 || d % 2 != 0) fail(ErrorCode::kDomain, "volume needs a positive even degree");
}

struct Welford {
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t count = 0;

  void add(double y) {
    ++count;
    const double delta = y - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (y - mean);
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

VolumeEstimate infinite_estimate(std::uint64_t samples, std::uint64_t seed, VolumeMethod method) {
  VolumeEstimate est;
  est.value = std::numeric_limits<double>::infinity();
  est.samples = samples;
  est.seed = seed;
  est.method = method;
  est.infinite = true;
  return est;
}

// Gaussian integral of a form given by its monomial coefficients, up to the
// common factor pi^{n/2}.
double gaussian_integral(const Form& g) {
  const auto c = monomial_from_rescaled(g);
  const auto& table = g.table();
  double total = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    double m = c[k];
    for (int a : table[k]) {
      if (a % 2 != 0) {
        m = 0.0;
        break;
      }
      m *= gamma_fn(0.5 * (a + 1)) / gamma_fn(0.5);
    }
    total += m;
  }
  return total;
}

// Importance sampling of integral exp(-f) against exp(-s |x|^d), s the
// reference scale. With x = r theta and t = s r^d ~ Gamma(n/d), homogeneity
// gives the weight exp(t (1 - f(theta) / s)) times the constant
// (kappa / s)^{n/d}.
VolumeGradient laplace_core(const Form& f, const LaplaceOptions& opt, bool with_gradient) {
  const int n = f.variables();
  const int d = f.degree();
  require_positive_even(d);
  if (opt.samples < 10) fail(ErrorCode::kDomain, "Laplace estimator needs at least 10 samples");

  VolumeGradient out;
  out.gradient.assign(with_gradient ? f.size() : 0, 0.0);
  out.std_error.assign(out.gradient.size(), 0.0);

  out.transform = opt.transform ? *opt.transform : isotropic_transform(f);
  if (out.transform.rows() != static_cast<std::size_t>(n) || out.transform.cols() != static_cast<std::size_t>(n))
    fail(ErrorCode::kShape, "transform must be n x n");
  const Form g = compose_linear(f, out.transform);
  const double scale = opt.reference_scale > 0.0 ? opt.reference_scale : screened_reference_scale(g, opt);
  out.reference_scale = scale;
  if (!(scale > 0.0)) {
    out.volume = infinite_estimate(opt.samples, opt.seed, VolumeMethod::kLaplace);
    return out;
  }

  const double a = static_cast<double>(n) / d;
  const double prefactor = std::pow(kappa(n, d) / scale, a) / gamma_fn(1.0 + a);
  const FormEvaluator eval(g);
  const FormEvaluator basis(f);

  Welford weights;
  std::vector<Welford> grads(out.gradient.size());
  std::vector<double> theta(static_cast<std::size_t>(n)), mapped(theta.size()), phi(f.size());
  for (std::uint64_t k = 0; k < opt.samples; ++k) {
    CounterEngine engine(opt.seed, opt.offset + k);
    sample_unit_vector(engine, theta);
    const double t = std::gamma_distribution<double>(a)(engine);
    const double ftheta = eval(theta);
    const double w = std::exp(t * (1.0 - ftheta / scale));
    if (!std::isfinite(w)) fail(ErrorCode::kNumeric, "importance weight overflow");
    weights.add(w);
    if (with_gradient) {
      // d/df_a exp(-f(L y)) = -phi_a(L y) exp(-g(y)), phi_a(L y) = (t / s) phi_a(L theta).
      for (std::size_t i = 0; i < mapped.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < theta.size(); ++j) acc += out.transform(i, j) * theta[j];
        mapped[i] = acc;
      }
      basis.basis(mapped, phi);
      const double factor = -(t / scale) * w;
      for (std::size_t i = 0; i < phi.size(); ++i) grads[i].add(factor * phi[i]);
    }
  }

  const double var = weights.variance();
  if (var > kBlowUpRatio * weights.mean * weights.mean || weights.mean <= 0.0) {
    out.volume = infinite_estimate(opt.samples, opt.seed, VolumeMethod::kLaplace);
    return out;
  }
  const double root_n = std::sqrt(static_cast<double>(opt.samples));
  out.volume.value = prefactor * weights.mean;
  out.volume.std_error = prefactor * std::sqrt(var) / root_n;
  out.volume.samples = opt.samples;
  out.volume.seed = opt.seed;
  out.volume.method = VolumeMethod::kLaplace;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    out.gradient[i] = prefactor * grads[i].mean;
    out.std_error[i] = prefactor * std::sqrt(grads[i].variance()) / root_n;
  }
  return out;
}

}  // namespace

const char* to_string(VolumeMethod method) {
  switch (method) {
    case VolumeMethod::kLaplace: return "laplace";
    case VolumeMethod::kSpherical: return "spherical";
    case VolumeMethod::kExact: return "exact";
  }
  return "unknown";
}

double ball_volume(int n) {
  if (n < 1) fail(ErrorCode::kDomain, "dimension must be at least 1");
  return std::pow(std::numbers::pi, 0.5 * n) / gamma_fn(0.5 * n + 1.0);
}

double kappa(int n, int d) {
  require_positive_even(d);
  if (n < 1) fail(ErrorCode::kDomain, "dimension must be at least 1");
  const double ratio = gamma_fn(1.0 + static_cast<double>(n) / d) / gamma_fn(1.0 + 0.5 * n);
  return std::pow(ratio, static_cast<double>(d) / n) * std::pow(std::numbers::pi, 0.5 * d);
}

GaussianLikeLaw::GaussianLikeLaw(int n, int d) : n_(n), d_(d), kappa_(formvol::kappa(n, d)) {}

double GaussianLikeLaw::density(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(n_)) fail(ErrorCode::kShape, "point has wrong dimension");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::exp(-kappa_ * std::pow(r2, 0.5 * d_));
}

void GaussianLikeLaw::sample(CounterEngine& engine, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(n_)) fail(ErrorCode::kShape, "point has wrong dimension");
  sample_unit_vector(engine, out);
  const double t = std::gamma_distribution<double>(static_cast<double>(n_) / d_)(engine);
  const double r = std::pow(t / kappa_, 1.0 / d_);
  for (double& v : out) v *= r;
}

Matrix isotropic_transform(const Form& f) {
  const int n = f.variables();
  const auto dim = static_cast<std::size_t>(n);
  Matrix identity = Matrix::identity(dim);
  if (f.degree() < 2) return identity;
  Matrix q(dim, dim);
  for (int i = 0; i < n; ++i) {
    const Form di = differentiate(f, i);
    for (int j = i; j < n; ++j) {
      const double v = gaussian_integral(differentiate(di, j));
      q(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
      q(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
    }
  }
  const auto eig = eigh(q);
  const double top = eig.values.front();
  const double bottom = eig.values.back();
  if (!(bottom > 1e-300) || top <= 2.0 * bottom || !std::isfinite(top)) return identity;
  double log_det = 0.0;
  for (double l : eig.values) log_det += std::log(l);
  const double unit = std::exp(log_det / (2.0 * n));
  Matrix l(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k)
        acc += eig.vectors(i, k) * eig.vectors(j, k) * unit / std::sqrt(eig.values[k]);
      l(i, j) = acc;
    }
  return l;
}

double screened_reference_scale(const Form& f, const LaplaceOptions& options) {
  return screened_minimum(f, options.screen_restarts, options.screen_iters, options.seed);
}

VolumeEstimate volume_laplace_mc(const Form& f, std::uint64_t samples, std::uint64_t seed) {
  LaplaceOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  return volume_laplace_mc(f, opt);
}

VolumeEstimate volume_laplace_mc(const Form& f, const LaplaceOptions& options) {
  return laplace_core(f, options, false).volume;
}

VolumeGradient volume_gradient(const Form& f, std::uint64_t samples, std::uint64_t seed) {
  LaplaceOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  return volume_gradient(f, opt);
}

VolumeGradient volume_gradient(const Form& f, const LaplaceOptions& options) {
  return laplace_core(f, options, true);
}

VolumeEstimate volume_spherical_mc(const Form& f, std::uint64_t samples, std::uint64_t seed) {
  const int n = f.variables();
  const int d = f.degree();
  require_positive_even(d);
  if (samples < 2) fail(ErrorCode::kDomain, "spherical estimator needs at least two samples");
  const double screened = screened_minimum(f, 32, 200, seed);
  if (!(screened > 0.0)) return infinite_estimate(samples, seed, VolumeMethod::kSpherical);

  const double exponent = -static_cast<double>(n) / d;
  const FormEvaluator eval(f);
  SphereSampler sampler(n, seed);
  std::vector<double> theta(static_cast<std::size_t>(n));
  Welford acc;
  for (std::uint64_t k = 0; k < samples; ++k) {
    sampler.next(theta);
    const double v = eval(theta);
    if (!(v > 0.0)) return infinite_estimate(samples, seed, VolumeMethod::kSpherical);
    acc.add(std::pow(v, exponent));
  }
  if (acc.variance() > kBlowUpRatio * acc.mean * acc.mean)
    return infinite_estimate(samples, seed, VolumeMethod::kSpherical);
  const double factor = sphere_surface(n) / n;
  VolumeEstimate est;
  est.value = factor * acc.mean;
  est.std_error = factor * std::sqrt(acc.variance() / static_cast<double>(samples));
  est.samples = samples;
  est.seed = seed;
  est.method = VolumeMethod::kSpherical;
  return est;
}

double volume_quadratic_exact(const Matrix& a) {
  const auto eig = eigh(a);
  double factor = 1.0;
  for (double l : eig.values) {
    if (!(l > 0.0)) fail(ErrorCode::kDomain, "quadratic form is not positive definite");
    factor /= std::sqrt(l);
  }
  return ball_volume(static_cast<int>(a.rows())) * factor;
}

double gaussian_like_moment(std::span<const int> alpha, int n, int d) {
  require_positive_even(d);
  if (alpha.size() != static_cast<std::size_t>(n)) fail(ErrorCode::kShape, "multi-index has wrong length");
  int total = 0;
  for (int a : alpha) {
    if (a < 0) fail(ErrorCode::kDomain, "negative exponent");
    if (a % 2 != 0) return 0.0;
    total += a;
  }
  const double m = n + total;
  // Gaussian factor for exp(-c |x|^2), c = kappa^{2/d}: each coordinate
  // contributes Gamma((a + 1) / 2) / c^{(a + 1) / 2}.
  const double log_c = 2.0 / d * std::log(kappa(n, d));
  double log_moment = log_gamma_fn(1.0 + m / d) - log_gamma_fn(1.0 + m / 2.0);
  for (int a : alpha) log_moment += log_gamma_fn(0.5 * (a + 1)) - 0.5 * (a + 1) * log_c;
  return std::exp(log_moment);
}

ProbabilityNormalization normalize_to_probability(const Form& f, double volume, double volume_std_error) {
  if (!std::isfinite(volume) || !(volume > 0.0))
    fail(ErrorCode::kDomain, "cannot normalize a form whose sublevel set has infinite or zero volume");
  const double ratio = static_cast<double>(f.degree()) / f.variables();
  ProbabilityNormalization out;
  out.c = std::pow(gamma_fn(1.0 + 1.0 / ratio) * volume, ratio);
  out.std_error = out.c * ratio * volume_std_error / volume;
  out.g = f * out.c;
  return out;
}

ProbabilityNormalization normalize_to_probability(const Form& f, const VolumeEstimate& volume) {
  if (volume.infinite) fail(ErrorCode::kDomain, "cannot normalize a form whose sublevel set has infinite volume");
  return normalize_to_probability(f, volume.value, volume.std_error);
}

}  // namespace formvol
