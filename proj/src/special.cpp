#include "formvol/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace formvol {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Gamma(x) for x in [0.5, 50].
double lanczos(double x) {
  const double z = x - 1.0;
  double a = kLanczosCoeffs[0];
  for (std::size_t k = 1; k < kLanczosCoeffs.size(); ++k) a += kLanczosCoeffs[k] / (z + static_cast<double>(k));
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

double log_lanczos(double x) {
  const double z = x - 1.0;
  double a = kLanczosCoeffs[0];
  for (std::size_t k = 1; k < kLanczosCoeffs.size(); ++k) a += kLanczosCoeffs[k] / (z + static_cast<double>(k));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace

double gamma_fn(double x) {
  if (std::isnan(x)) return x;
  if (x <= 0.0 && x == std::floor(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x < 0.5) {
    // Reflection keeps negative non-integers usable; the positive part of
    // (0, 0.5) goes through the upward recurrence.
    if (x < 0.0)
      return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    return gamma_fn(x + 1.0) / x;
  }
  if (x > 50.0) {
    if (x > 172.0) return std::numeric_limits<double>::infinity();
    double g = 1.0;
    while (x > 50.0) {
      x -= 1.0;
      g *= x;
    }
    return g * lanczos(x);
  }
  return lanczos(x);
}

double log_gamma_fn(double x) {
  if (x <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x < 0.5) return log_gamma_fn(x + 1.0) - std::log(x);
  return log_lanczos(x);
}

}  // namespace formvol
