#include "formvol/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "formvol/errors.hpp"
#include "formvol/norms.hpp"

namespace formvol {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxHalvings = 40;
constexpr int kScreenRestarts = 32;
constexpr int kScreenIters = 200;
constexpr std::uint64_t kFinalTag = 0xF17A1;
constexpr std::uint64_t kStepScreenTag = 0x57E9;

bool is_inf_p(double p) { return std::isinf(p) && p > 0; }

double gram_norm(const Matrix& g, const NormSpec& norm) {
  return norm.kind == NormKind::kSpectral ? spectral_norm(g) : schatten_norm(g, norm.p);
}

double euclid(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double euclid_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Euclidean projection onto the unit l1 ball.
void project_l1_ball(std::vector<double>& c) {
  double total = 0.0;
  for (double x : c) total += std::abs(x);
  if (total <= 1.0) return;
  std::vector<double> u(c.size());
  std::transform(c.begin(), c.end(), u.begin(), [](double x) { return std::abs(x); });
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  for (double& x : c) x = std::copysign(std::max(std::abs(x) - tau, 0.0), x);
}

bool screened_positive(const Form& f, std::uint64_t seed) {
  return min_sphere(f, kScreenRestarts, kScreenIters, seed).value > 0.0;
}

// Projection onto the feasible set followed by a radial push to the unit
// sphere of the norm; v decreases along rays, so the optimum lies there.
Form project_form(const Form& f, const NormSpec& norm) {
  if (norm.kind == NormKind::kBombieri) {
    const double nb = bombieri_norm(f);
    if (nb == 0.0) fail(ErrorCode::kNumeric, "iterate collapsed to zero");
    return f * (1.0 / nb);
  }
  auto c = monomial_from_rescaled(f);
  project_l1_ball(c);
  double total = 0.0;
  for (double x : c) total += std::abs(x);
  if (total == 0.0) fail(ErrorCode::kNumeric, "iterate collapsed to zero");
  for (double& x : c) x /= total;
  return rescaled_from_monomial(f.variables(), f.degree(), c);
}

Matrix project_gram(const Matrix& g, double p) {
  Matrix out = project_psd_schatten_ball(g, p);
  const double nrm = schatten_norm(out, p);
  if (nrm == 0.0) fail(ErrorCode::kNumeric, "Gram iterate collapsed to zero");
  return out * (1.0 / nrm);
}

double form_residual(const Form& f, const NormSpec& norm) {
  const double nrm = norm.kind == NormKind::kBombieri ? bombieri_norm(f) : l1_coeff_norm(f);
  return std::max(0.0, nrm - 1.0);
}

double gram_residual(const Matrix& g, double p) {
  const auto eig = eigh(g);
  double r = std::max(0.0, schatten_norm(g, p) - 1.0);
  if (!eig.values.empty()) r += std::max(0.0, -eig.values.back());
  return r;
}

// Shared driver. `State` is a Form or a Matrix; the callbacks map a state to
// its form, to the gradient in state coordinates, and project it.
template <class State, class ToForm, class Grad, class Project, class Residual>
State run_subgradient(const NormSpec& norm, int n, int d, const SolverOptions& opt, State x, ToForm to_form,
                            Grad grad_of, Project project, Residual residual, SolverTrace& trace) {
  if (opt.iters < 1) fail(ErrorCode::kDomain, "solver needs at least one iteration");
  if (opt.samples < 10 || opt.eval_samples < 10) fail(ErrorCode::kDomain, "solver needs at least 10 samples");
  trace.norm = norm;
  trace.n = n;
  trace.d = d;
  trace.seed = opt.seed;

  if (!screened_positive(to_form(x), derive_seed(opt.seed, kStepScreenTag)))
    fail(ErrorCode::kInitialization, "starting point has infinite volume");

  std::uint64_t samples = std::max(opt.samples, std::uint64_t{10});
  const std::uint64_t cap = std::max(samples, opt.max_samples);
  std::uint64_t counter = 0;
  double s0 = 0.0;
  double shrink = 1.0;
  double best = kInf;
  double previous = kInf;
  State previous_x = x;
  bool have_previous = false;

  const int tail_start = opt.iters / 2;
  std::optional<State> tail_sum;
  int tail_count = 0;

  for (int k = 0; k < opt.iters; ++k) {
    LaplaceOptions lo;
    lo.samples = samples;
    lo.seed = opt.seed;
    lo.offset = counter;
    counter += samples;

    VolumeGradient vg;
    bool bad = false;
    try {
      vg = volume_gradient(to_form(x), lo);
      bad = vg.volume.infinite;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumeric) throw;
      bad = true;
    }
    if (bad) {
      if (!have_previous) fail(ErrorCode::kInitialization, "starting point has infinite volume");
      x = previous_x;
      shrink *= 0.5;
      TraceRow row;
      row.iter = k;
      row.objective = kInf;
      row.best = best;
      row.samples = samples;
      row.rejections = 1;
      trace.rows.push_back(row);
      continue;
    }

    const double v = vg.volume.value;
    const double sigma = vg.volume.std_error;
    best = std::min(best, v);
    if (k > 0 && std::isfinite(previous) && std::abs(v - previous) < 2.0 * sigma) samples = std::min(2 * samples, cap);
    previous = v;

    if (k >= tail_start) {
      if (tail_sum) {
        *tail_sum = *tail_sum + x;
      } else {
        tail_sum = x;
      }
      ++tail_count;
    }

    const State g = grad_of(vg.gradient);
    const double gnorm = g.frobenius_like();
    if (s0 == 0.0) s0 = gnorm > 0.0 ? opt.step / gnorm : opt.step;
    double step = shrink * s0 / std::sqrt(static_cast<double>(k + 1));

    TraceRow row;
    row.iter = k;
    row.objective = v;
    row.std_error = sigma;
    row.best = best;
    row.residual = residual(x);
    row.samples = vg.volume.samples;

    bool accepted = false;
    for (int h = 0; h < kMaxHalvings && gnorm > 0.0; ++h) {
      State candidate = project(x - g * step);
      if (screened_positive(to_form(candidate), derive_seed(opt.seed, kStepScreenTag + static_cast<std::uint64_t>(k)))) {
        previous_x = x;
        have_previous = true;
        x = std::move(candidate);
        accepted = true;
        break;
      }
      step *= 0.5;
      ++row.rejections;
    }
    row.step = accepted ? step : 0.0;
    trace.rows.push_back(row);
  }

  // Tail averaging damps the Monte Carlo noise of the last iterates; the
  // average is feasible by convexity and gets pushed back to the boundary.
  State final_x = x;
  if (tail_sum && tail_count > 0) {
    State avg = *tail_sum * (1.0 / tail_count);
    State candidate = project(avg);
    if (screened_positive(to_form(candidate), derive_seed(opt.seed, kStepScreenTag))) final_x = std::move(candidate);
  }

  LaplaceOptions fo;
  fo.samples = opt.eval_samples;
  fo.seed = derive_seed(opt.seed, kFinalTag);
  trace.final_form = to_form(final_x);
  trace.final_objective = volume_laplace_mc(trace.final_form, fo);
  trace.final_objective.seed = opt.seed;
  return final_x;
}

// Thin wrappers giving Form and Matrix the same arithmetic surface.
struct FormState {
  Form f;
  FormState operator+(const FormState& o) const { return {f + o.f}; }
  FormState operator-(const FormState& o) const { return {f - o.f}; }
  FormState operator*(double s) const { return {f * s}; }
  double frobenius_like() const { return euclid(f.coeffs()); }
};

struct GramState {
  Matrix g;
  GramState operator+(const GramState& o) const { return {g + o.g}; }
  GramState operator-(const GramState& o) const { return {g - o.g}; }
  GramState operator*(double s) const { return {g * s}; }
  double frobenius_like() const { return g.frobenius(); }
};

Form unit_ball_point(const NormSpec& norm, int n, int d) {
  const Form b = ball_form(n, d);
  if (norm.kind == NormKind::kL1Coeff) return b * (1.0 / l1_coeff_norm(b));
  return b * (1.0 / norm_of_ball(norm, n, d));
}

std::vector<double> quantiles(std::vector<double> v) {
  if (v.empty()) return {};
  std::sort(v.begin(), v.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {v.front(), at(0.1), at(0.5), at(0.9), v.back()};
}

Matrix random_psd(CounterEngine& engine, std::size_t dim, std::size_t rank) {
  Matrix a(dim, rank);
  std::vector<double> z(dim * rank);
  fill_normal(engine, z);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t k = 0; k < rank; ++k) a(i, k) = z[i * rank + k];
  return a * a.transpose();
}

struct TrialPoint {
  Form f = Form(1, 0);
  double norm_rel_sigma = 0.0;  // relative standard error of the norm used to scale f
};

// A feasible point on the unit sphere of `norm`.
TrialPoint make_trial(const NormSpec& norm, int n, int d, int trial, std::uint64_t trial_seed,
                      std::uint64_t norm_samples) {
  CounterEngine engine(trial_seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t dim = gram_dimension(n, d);
  const bool exact = trial == 0;
  const bool near = !exact && trial % 4 == 1;
  // Perturbation sizes between 1e-3 and 1e-1.
  const double eps = std::pow(10.0, -3.0 + 2.0 * unif(engine));
  const std::size_t rank = dim + static_cast<std::size_t>(trial % 3);

  auto base_gram = [&]() {
    Matrix g = Matrix::identity(dim);
    if (exact) return g;
    Matrix w = random_psd(engine, dim, rank);
    const double tr = w.trace();
    if (near) return g + w * (eps * static_cast<double>(dim) / tr);
    return w;
  };

  TrialPoint out;
  if (norm.on_gram()) {
    Matrix g = base_gram();
    g = g * (1.0 / gram_norm(g, norm));
    out.f = form_from_gram(GramMatrix(n, d, g));
    return out;
  }

  if (norm.kind == NormKind::kNuclear) {
    // Certified bounds only: b has a known nuclear norm, and every added
    // power sum contributes at most the l1 norm of its weights.
    std::normal_distribution<double> normal(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::vector<PowerTerm> terms;
    const std::size_t count = exact ? 0 : dim + 1 + static_cast<std::size_t>(trial % 3);
    for (std::size_t k = 0; k < count; ++k) {
      PowerTerm t;
      t.weight = expo(engine);
      t.direction.resize(static_cast<std::size_t>(n));
      sample_unit_vector(engine, t.direction);
      terms.push_back(std::move(t));
    }
    Form sum(n, d);
    for (const auto& t : terms) sum += power_form(t.direction, d) * t.weight;
    double bound = 0.0;
    if (exact) {
      out.f = ball_form(n, d);
      bound = nuclear_norm_ball(n, d);
    } else if (near) {
      const double scale = eps / std::accumulate(terms.begin(), terms.end(), 0.0,
                                                 [](double a, const PowerTerm& t) { return a + t.weight; });
      out.f = ball_form(n, d) + sum * scale;
      bound = nuclear_norm_ball(n, d) + eps;
    } else {
      out.f = sum;
      bound = nuclear_upper_bound(terms, sum);
    }
    out.f *= 1.0 / bound;
    return out;
  }

  Form f = form_from_gram(GramMatrix(n, d, base_gram()));
  double nrm = 0.0;
  switch (norm.kind) {
    case NormKind::kBombieri:
      nrm = bombieri_norm(f);
      break;
    case NormKind::kLpSphere: {
      if (exact) {
        nrm = lp_norm_ball_exact(n, norm.p);
        break;
      }
      const auto est = lp_sphere_norm(f, norm.p, norm_samples, derive_seed(trial_seed, 7));
      nrm = est.value;
      out.norm_rel_sigma = est.std_error / est.value;
      break;
    }
    case NormKind::kSupSphere:
      nrm = exact ? 1.0 : sup_sphere_norm(f, kScreenRestarts, kScreenIters, derive_seed(trial_seed, 7)).value;
      break;
    default:
      fail(ErrorCode::kNotInvariant, "norm " + norm.name() + " has no closed-form optimum");
  }
  out.f = f * (1.0 / nrm);
  return out;
}

struct TrialResult {
  bool infinite = false;
  double value = 0.0;
  double std_error = 0.0;
  Form f = Form(1, 0);
};

}  // namespace

std::string NormSpec::name() const {
  switch (kind) {
    case NormKind::kBombieri:
      return "bombieri";
    case NormKind::kL1Coeff:
      return "l1";
    case NormKind::kLpSphere:
      return "lp";
    case NormKind::kSupSphere:
      return "sup";
    case NormKind::kNuclear:
      return "nuclear";
    case NormKind::kSchatten:
      return "schatten";
    case NormKind::kSpectral:
      return "spectral";
  }
  return "unknown";
}

NormSpec parse_norm_spec(std::string_view name, double p) {
  if (name == "bombieri") return NormSpec::bombieri();
  if (name == "l1") return NormSpec::l1_coeff();
  if (name == "sup") return NormSpec::sup_sphere();
  if (name == "nuclear") return NormSpec::nuclear();
  if (name == "spectral") return NormSpec::spectral();
  if (name == "lp" || name == "schatten") {
    if (!(p >= 1.0)) fail(ErrorCode::kDomain, "p must be >= 1");
    if (name == "lp") {
      if (std::isinf(p)) return NormSpec::sup_sphere();
      return NormSpec::lp_sphere(p);
    }
    if (std::isinf(p)) return NormSpec::spectral();
    return NormSpec::schatten(p);
  }
  fail(ErrorCode::kDomain, "unknown norm '" + std::string(name) + "'");
}

double l1_coeff_norm(const Form& f) {
  double s = 0.0;
  for (double c : monomial_from_rescaled(f)) s += std::abs(c);
  return s;
}

double norm_of_ball(const NormSpec& norm, int n, int d) {
  switch (norm.kind) {
    case NormKind::kBombieri:
      return bombieri_norm_ball_exact(n, d);
    case NormKind::kL1Coeff:
      return l1_coeff_norm(ball_form(n, d));
    case NormKind::kLpSphere:
      return lp_norm_ball_exact(n, norm.p);
    case NormKind::kSupSphere:
      return 1.0;
    case NormKind::kNuclear:
      return nuclear_norm_ball(n, d);
    case NormKind::kSchatten:
      if (!(norm.p >= 1.0)) fail(ErrorCode::kDomain, "Schatten norm needs p >= 1");
      return std::pow(static_cast<double>(gram_dimension(n, d)), 1.0 / norm.p);
    case NormKind::kSpectral:
      gram_dimension(n, d);
      return 1.0;
  }
  fail(ErrorCode::kDomain, "unknown norm");
}

double theoretical_opt(const NormSpec& norm, int n, int d) {
  if (!norm.invariant())
    fail(ErrorCode::kNotInvariant, "the " + norm.name() + " norm is not orthogonally invariant");
  if (d <= 0 || d % 2 != 0) fail(ErrorCode::kDomain, "degree must be positive and even");
  return std::pow(norm_of_ball(norm, n, d), static_cast<double>(n) / d) * ball_volume(n);
}

SolverTrace minimize_volume_form(const NormSpec& norm, int n, int d, const SolverOptions& options) {
  if (norm.kind != NormKind::kBombieri && norm.kind != NormKind::kL1Coeff)
    fail(ErrorCode::kDomain, "form solver supports the bombieri and l1 norms");
  if (d <= 0 || d % 2 != 0) fail(ErrorCode::kDomain, "degree must be positive and even");

  Form start = options.start ? *options.start : unit_ball_point(norm, n, d);
  if (start.variables() != n || start.degree() != d) fail(ErrorCode::kShape, "start form has the wrong shape");
  // Starts are rescaled onto the norm sphere rather than projected, which
  // keeps their direction.
  const double start_norm = norm.kind == NormKind::kBombieri ? bombieri_norm(start) : l1_coeff_norm(start);
  if (!(start_norm > 0.0)) fail(ErrorCode::kInitialization, "start form is zero");
  start *= 1.0 / start_norm;

  const MultiIndexTable& table = multi_index_table(n, d);
  const auto sm = table.sqrt_multinomials();
  const bool l1 = norm.kind == NormKind::kL1Coeff;

  SolverTrace trace;
  run_subgradient(
      norm, n, d, options, FormState{std::move(start)}, [](const FormState& s) { return s.f; },
      [&](const std::vector<double>& g) {
        // The l1 ball lives in monomial coordinates c_a = f_a sqrt(mult);
        // there the gradient is g_a / sqrt(mult), mapped back to rescaled
        // coordinates by another factor 1 / sqrt(mult).
        std::vector<double> out(g);
        if (l1)
          for (std::size_t i = 0; i < out.size(); ++i) out[i] /= sm[i] * sm[i];
        return FormState{Form(n, d, std::move(out))};
      },
      [&](const FormState& s) { return FormState{project_form(s.f, norm)}; },
      [&](const FormState& s) { return form_residual(s.f, norm); }, trace);
  trace.final_norm = l1 ? l1_coeff_norm(trace.final_form) : bombieri_norm(trace.final_form);
  if (l1) {
    // No closed-form minimizer: report the nearest builtin direction.
    const auto c = monomial_from_rescaled(trace.final_form);
    double best_cos = -2.0;
    for (const char* name : {"ball", "powers"}) {
      const Form ref = std::string(name) == "ball" ? ball_form(n, d) : powers_form(n, d);
      auto r = monomial_from_rescaled(ref);
      const double l1n = l1_coeff_norm(ref);
      for (double& x : r) x /= l1n;
      const double cosine = std::inner_product(c.begin(), c.end(), r.begin(), 0.0) / (euclid(c) * euclid(r));
      if (cosine > best_cos) {
        best_cos = cosine;
        trace.reference_name = name;
        trace.reference_distance = euclid_distance(c, r);
      }
    }
  } else {
    trace.reference_name = "ball";
    trace.reference_distance = euclid_distance(trace.final_form.coeffs(), unit_ball_point(norm, n, d).coeffs());
  }
  return trace;
}

SolverTrace minimize_volume_sos(double p, int n, int d, const SolverOptions& options) {
  if (!(p == 1.0 || p == 2.0 || is_inf_p(p))) fail(ErrorCode::kDomain, "SOS solver supports p in {1, 2, inf}");
  const std::size_t dim = gram_dimension(n, d);
  if (d <= 0) fail(ErrorCode::kDomain, "degree must be positive and even");
  const NormSpec norm = is_inf_p(p) ? NormSpec::spectral() : NormSpec::schatten(p);

  Matrix start = options.start_gram ? options.start_gram->entries() : Matrix::identity(dim);
  if (options.start_gram && (options.start_gram->variables() != n || options.start_gram->degree() != d))
    fail(ErrorCode::kShape, "start Gram matrix has the wrong shape");
  const auto start_eig = eigh(start);
  if (!start_eig.values.empty() && start_eig.values.back() >= -1e-12 * std::abs(start_eig.values.front())) {
    const double nrm = schatten_norm(start, p);
    if (!(nrm > 0.0)) fail(ErrorCode::kInitialization, "start Gram matrix is zero");
    start = start * (1.0 / nrm);
  } else {
    start = project_gram(start, p);
  }

  SolverTrace trace;
  const GramState last = run_subgradient(
      norm, n, d, options, GramState{std::move(start)},
      [&](const GramState& s) { return form_from_gram(GramMatrix(n, d, s.g)); },
      [&](const std::vector<double>& g) { return GramState{gram_pullback(n, d, g)}; },
      [&](const GramState& s) { return GramState{project_gram(s.g, p)}; },
      [&](const GramState& s) { return gram_residual(s.g, p); }, trace);

  trace.final_gram = GramMatrix(n, d, last.g);
  trace.final_norm = schatten_norm(last.g, p);
  trace.reference_name = "identity";
  const Matrix id = Matrix::identity(dim) * (1.0 / norm_of_ball(norm, n, d));
  trace.reference_distance = (last.g - id).frobenius();
  return trace;
}

LowerBoundReport verify_lower_bound(const NormSpec& norm, int n, int d, const VerifyOptions& options) {
  if (options.trials < 1) fail(ErrorCode::kDomain, "need at least one trial");
  if (options.samples < 10) fail(ErrorCode::kDomain, "need at least 10 samples per trial");
  if (!(options.tol >= 0.0)) fail(ErrorCode::kDomain, "tolerance must be nonnegative");
  if (!(options.bound_scale > 0.0)) fail(ErrorCode::kDomain, "bound scale must be positive");

  LowerBoundReport report;
  report.norm = norm;
  report.n = n;
  report.d = d;
  report.theoretical_opt = theoretical_opt(norm, n, d);
  report.bound = report.theoretical_opt * options.bound_scale;
  report.trials = options.trials;
  report.tol = options.tol;

  std::vector<TrialResult> results(static_cast<std::size_t>(options.trials));
  auto run_one = [&](int k) {
    const std::uint64_t trial_seed = derive_seed(options.seed, 2 * static_cast<std::uint64_t>(k));
    TrialPoint point = make_trial(norm, n, d, k, trial_seed, options.samples);
    const auto est = volume_laplace_mc(point.f, options.samples, derive_seed(options.seed, 2 * static_cast<std::uint64_t>(k) + 1));
    TrialResult& r = results[static_cast<std::size_t>(k)];
    r.infinite = est.infinite;
    r.value = est.value;
    // v(f / nu) = nu^{n/d} v(f): relative errors add in quadrature.
    const double rel_v = est.value > 0.0 ? est.std_error / est.value : 0.0;
    const double rel_n = static_cast<double>(n) / d * point.norm_rel_sigma;
    r.std_error = est.value * std::sqrt(rel_v * rel_v + rel_n * rel_n);
    r.f = std::move(point.f);
  };

  const int threads = std::clamp(options.threads, 1, options.trials);
  if (threads == 1) {
    for (int k = 0; k < options.trials; ++k) run_one(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int k = w; k < options.trials; k += threads) run_one(k);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<double> ratios;
  for (int k = 0; k < options.trials; ++k) {
    const TrialResult& r = results[static_cast<std::size_t>(k)];
    if (r.infinite) {
      ++report.infinite_trials;
      continue;
    }
    ratios.push_back(r.value / report.bound);
    // Exact cases have sigma = 0; a relative rounding floor keeps them fair.
    const double slack = std::max({3.0 * r.std_error, options.tol * report.bound, 1e-12 * report.bound});
    if (r.value < report.bound - slack) report.violations.push_back({k, r.value, r.std_error, report.bound, r.f});
  }
  report.ratio_quantiles = quantiles(ratios);
  report.min_ratio = ratios.empty() ? kInf : report.ratio_quantiles.front();
  return report;
}

PStarReport verify_pstar_equivalence(const NormSpec& norm, int n, int d, std::uint64_t seed, std::uint64_t samples) {
  if (norm.on_gram() || !norm.invariant())
    fail(ErrorCode::kNotInvariant, "the " + norm.name() + " norm is not an orthogonally invariant norm on forms");
  PStarReport r;
  r.norm = norm;
  r.n = n;
  r.d = d;
  r.kappa = kappa(n, d);
  const Form b = ball_form(n, d);

  r.c_closed = normalize_to_probability(b, ball_volume(n)).c;
  r.c_closed_rel_error = std::abs(r.c_closed - r.kappa) / r.kappa;
  const auto mc = normalize_to_probability(b, volume_laplace_mc(b, samples, seed));
  r.c_mc = mc.c;
  r.c_mc_std_error = mc.std_error;

  const double nb = norm_of_ball(norm, n, d);
  r.opt_star = r.kappa * nb;
  const Form kb = b * r.kappa;
  switch (norm.kind) {
    case NormKind::kBombieri:
      r.measured_norm = bombieri_norm(kb);
      break;
    case NormKind::kLpSphere: {
      const auto est = lp_sphere_norm(kb, norm.p, samples, derive_seed(seed, 3));
      r.measured_norm = est.value;
      r.measured_std_error = est.std_error;
      break;
    }
    case NormKind::kSupSphere:
      r.measured_norm = sup_sphere_norm(kb, kScreenRestarts, kScreenIters, derive_seed(seed, 3)).value;
      break;
    default:
      r.measured_norm = r.kappa * nuclear_norm_ball(n, d);
      break;
  }

  const bool closed_ok = r.c_closed_rel_error <= 1e-6;
  const bool mc_ok = std::abs(r.c_mc - r.kappa) <= std::max(3.0 * r.c_mc_std_error, 1e-9 * r.kappa);
  const bool norm_ok = std::abs(r.measured_norm - r.opt_star) <= std::max(3.0 * r.measured_std_error, 1e-9 * r.opt_star);
  r.passed = closed_ok && mc_ok && norm_ok;
  return r;
}

}  // namespace formvol
