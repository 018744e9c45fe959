#pragma once

// Volume minimization over norm balls of forms and over PSD Gram matrices in
// Schatten balls, the closed-form optima for orthogonally invariant norms,
// and randomized checks of the resulting lower bounds.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "formvol/formcore.hpp"
#include "formvol/random.hpp"
#include "formvol/sos.hpp"
#include "formvol/volume.hpp"

namespace formvol {

enum class NormKind {
  kBombieri,
  kL1Coeff,    // l1 norm of monomial-basis coefficients (not invariant)
  kLpSphere,   // L^p on the sphere, p >= 1
  kSupSphere,  // max over the sphere
  kNuclear,    // nuclear norm of forms (certified upper bounds only)
  kSchatten,   // Schatten p-norm of the Gram matrix
  kSpectral,   // largest |eigenvalue| of the Gram matrix
};

struct NormSpec {
  NormKind kind = NormKind::kBombieri;
  double p = 2.0;

  static NormSpec bombieri() { return {NormKind::kBombieri, 2.0}; }
  static NormSpec l1_coeff() { return {NormKind::kL1Coeff, 1.0}; }
  static NormSpec lp_sphere(double p) { return {NormKind::kLpSphere, p}; }
  static NormSpec sup_sphere() { return {NormKind::kSupSphere, 0.0}; }
  static NormSpec nuclear() { return {NormKind::kNuclear, 1.0}; }
  static NormSpec schatten(double p) { return {NormKind::kSchatten, p}; }
  static NormSpec spectral() { return {NormKind::kSpectral, 0.0}; }

  // Acts on Gram matrices rather than on forms.
  bool on_gram() const noexcept { return kind == NormKind::kSchatten || kind == NormKind::kSpectral; }
  bool invariant() const noexcept { return kind != NormKind::kL1Coeff; }
  std::string name() const;
};

// Accepts bombieri, l1, lp, sup, nuclear, schatten, spectral; `p` is used by
// lp and schatten.
NormSpec parse_norm_spec(std::string_view name, double p = 2.0);

double l1_coeff_norm(const Form& f);

// ||b_{d,n}|| for form norms, ||id_N|| for Gram norms.
double norm_of_ball(const NormSpec& norm, int n, int d);

// ||b_{d,n}||^{n/d} v(b_{d,n}) (forms) or ||id_N||^{n/d} v(b_{d,n}) (Gram).
// Throws kNotInvariant for the l1 coefficient norm.
double theoretical_opt(const NormSpec& norm, int n, int d);

struct SolverOptions {
  int iters = 200;
  std::uint64_t samples = 20000;      // per gradient, doubled on stalls
  std::uint64_t max_samples = 160000;
  std::uint64_t eval_samples = 200000;  // final objective estimate
  std::uint64_t seed = kDefaultSeed;
  double step = 0.5;  // first step length s0 = step / ||grad_0||
  std::optional<Form> start;
  std::optional<GramMatrix> start_gram;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double std_error = 0.0;
  double best = 0.0;  // running minimum of `objective`
  double step = 0.0;
  double residual = 0.0;  // infeasibility of the iterate (0 when feasible)
  std::uint64_t samples = 0;
  int rejections = 0;  // halvings caused by infinite-volume candidates
};

struct SolverTrace {
  NormSpec norm;
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
  Form final_form = Form(1, 0);
  std::optional<GramMatrix> final_gram;
  double final_norm = 0.0;
  VolumeEstimate final_objective;
  // Known or nearest builtin minimizer and the distance to it: Bombieri
  // distance to b / ||b|| (bombieri), Euclidean distance of monomial
  // coefficients to the unit-l1 builtin (l1), Frobenius distance of Gram
  // matrices to id / ||id||_p (SOS).
  std::string reference_name;
  double reference_distance = 0.0;
};

// Projected subgradient on P: minimize v(f) subject to ||f|| <= 1 for the
// Bombieri or l1 coefficient norm. Defaults to starting at b / ||b||.
SolverTrace minimize_volume_form(const NormSpec& norm, int n, int d, const SolverOptions& options = {});

// Projected subgradient on P^sos over {G PSD, ||G||_p <= 1}, p in
// {1, 2, inf}. Defaults to starting at id / ||id||_p.
SolverTrace minimize_volume_sos(double p, int n, int d, const SolverOptions& options = {});

struct VerifyOptions {
  int trials = 500;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t samples = 20000;  // Monte Carlo samples per volume estimate
  double tol = 1e-3;              // relative floor of the tolerance
  int threads = 1;
  // Multiplies the theoretical bound; values > 1 exercise the failure path.
  double bound_scale = 1.0;
};

struct Violation {
  int trial = 0;
  double value = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  Form form = Form(1, 0);
};

struct LowerBoundReport {
  NormSpec norm;
  int n = 0;
  int d = 0;
  double theoretical_opt = 0.0;
  double bound = 0.0;  // theoretical_opt * bound_scale
  int trials = 0;
  int infinite_trials = 0;
  double min_ratio = 0.0;
  // min, 10%, 50%, 90%, max of v(f) / bound over finite trials
  std::vector<double> ratio_quantiles;
  double tol = 0.0;
  std::vector<Violation> violations;

  bool passed() const noexcept { return violations.empty(); }
};

// Samples feasible points of the problem for `norm` (trial 0 is the claimed
// minimizer, every fourth trial a small perturbation of it, the rest random
// sums of squares) and checks v(f) >= bound - max(3 sigma, tol * bound).
LowerBoundReport verify_lower_bound(const NormSpec& norm, int n, int d, const VerifyOptions& options = {});

struct PStarReport {
  NormSpec norm;
  int n = 0;
  int d = 0;
  double kappa = 0.0;
  double c_closed = 0.0;  // normalization of b from the exact ball volume
  double c_closed_rel_error = 0.0;
  double c_mc = 0.0;  // normalization of b from a Laplace estimate
  double c_mc_std_error = 0.0;
  double opt_star = 0.0;           // kappa ||b||
  double measured_norm = 0.0;      // ||kappa b|| evaluated directly
  double measured_std_error = 0.0;
  bool passed = false;
};

// Checks that b normalizes to the law exp(-kappa |x|^d) and that
// ||kappa b|| = kappa ||b||.
PStarReport verify_pstar_equivalence(const NormSpec& norm, int n, int d, std::uint64_t seed = kDefaultSeed,
                                     std::uint64_t samples = 200000);

}  // namespace formvol
