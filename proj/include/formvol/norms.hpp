#pragma once

// Norms of forms defined through the unit sphere S^{n-1}.
//
// L^p norms integrate against the unnormalized surface measure, whose total
// mass is sphere_surface(n), NOT against the uniform probability measure:
//
//   ||f||_p = ( |S^{n-1}| * E_uniform |f|^p )^{1/p}.

#include <cstdint>

#include "formvol/formcore.hpp"

namespace formvol {

enum class NormEstimateKind { kLp, kSup, kMin };

struct NormEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for closed forms and for sphere searches
  std::uint64_t samples = 0;
  NormEstimateKind kind = NormEstimateKind::kLp;
};

// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
double sphere_surface(int n);

// Monte Carlo L^p norm with a delta-method standard error.
NormEstimate lp_sphere_norm(const Form& f, double p, std::uint64_t samples, std::uint64_t seed);

// ||b_{d,n}||_p = |S^{n-1}|^{1/p}.
double lp_norm_ball_exact(int n, double p);

// Multistart projected gradient ascent of |f| on the sphere. The result is
// a lower bound on max |f|; it is never below |f| at any start point.
NormEstimate sup_sphere_norm(const Form& f, int restarts, int iters, std::uint64_t seed);

// Multistart projected descent of f on the sphere; an upper bound on
// min f. A negative value proves that {f <= 1} has infinite volume.
NormEstimate min_sphere(const Form& f, int restarts, int iters, std::uint64_t seed);

}  // namespace formvol
