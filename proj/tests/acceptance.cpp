// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "formvol/extremal.hpp"
#include "formvol/formcore.hpp"
#include "formvol/norms.hpp"
#include "formvol/random.hpp"
#include "formvol/sos.hpp"
#include "formvol/special.hpp"
#include "formvol/volume.hpp"

using namespace formvol;

namespace {

constexpr double kPi = std::numbers::pi;
// v(x^4 + y^4) = (2 Gamma(5/4))^2 / Gamma(3/2), from mpmath.
constexpr double kVolX4Y4 = 3.70814935460274383686770069439;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(const char* id, bool ok, double secs, const std::string& what) {
  std::printf("%s %s (%.2fs) %s\n", ok ? "PASS" : "FAIL", id, secs, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...) {
  std::fputs("    ", stdout);
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::fputc('\n', stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Matrix random_psd(std::size_t n, std::uint64_t seed, double shift) {
  CounterEngine e(seed, 0);
  std::vector<double> z(n * n);
  fill_normal(e, z);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += z[i * n + k] * z[j * n + k];
      m(i, j) = s / static_cast<double>(n) + (i == j ? shift : 0.0);
    }
  return m;
}

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  CounterEngine e(seed, 0);
  std::vector<double> z(n * n);
  fill_normal(e, z);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (z[i * n + j] + z[j * n + i]);
  return m;
}

double det(const Matrix& a) {
  const auto e = eigh(a);
  double p = 1.0;
  for (double v : e.values) p *= v;
  return p;
}

// ||(x1^2+...+xn^2)^k||_B^2 = 4^k k! (n/2)_k / (2k)!, computed term by term.
double ball_norm_product(int n, int d) {
  const int k = d / 2;
  double s = 1.0;
  for (int j = 1; j <= k; ++j) s *= 4.0 * j * (j - 1 + 0.5 * n) / ((2.0 * j - 1) * (2.0 * j));
  return std::sqrt(s);
}

std::size_t binomial_direct(int top, int bottom) {
  std::size_t r = 1;
  for (int i = 1; i <= bottom; ++i) r = r * static_cast<std::size_t>(top - bottom + i) / static_cast<std::size_t>(i);
  return r;
}

void ac1() {
  const auto t0 = Clock::now();
  double worst_norm = 0.0;
  bool dims = true;
  for (int n = 1; n <= 6; ++n)
    for (int d : {2, 4, 6, 8, 10}) {
      worst_norm = std::max(worst_norm, rel(bombieri_norm(ball_form(n, d)), ball_norm_product(n, d)));
      dims = dims && gram_dimension(n, d) == binomial_direct(n + d / 2 - 1, d / 2);
    }
  double worst_id = 0.0;
  for (int n = 1; n <= 4; ++n)
    for (int d : {2, 4, 6}) {
      const auto id = GramMatrix::identity(n, d);
      const double big_n = static_cast<double>(id.dimension());
      for (double p : {1.0, 1.5, 2.0, 3.0})
        worst_id = std::max(worst_id, rel(schatten_norm(id.entries(), p), std::pow(big_n, 1.0 / p)));
      worst_id = std::max(worst_id, rel(schatten_norm(id.entries(), INFINITY), 1.0));
    }
  const double secs = seconds_since(t0);
  detail("max rel error: ball Bombieri norm %.2e, ||id||_p %.2e; dimensions %s", worst_norm, worst_id,
         dims ? "match" : "differ");
  report("AC1", worst_norm <= 1e-12 && worst_id <= 1e-12 && dims && secs < 1.0, secs,
         "closed forms for ball norms, Gram dimensions, identity Schatten norms");
}

bool within_3sigma(const VolumeEstimate& v, double truth) {
  return std::abs(v.value - truth) <= std::max(3.0 * v.std_error, 1e-12 * truth);
}

void ac2() {
  const auto t0 = Clock::now();
  bool ok = true;
  struct Golden {
    const char* name;
    Form f;
    double truth;
  };
  const std::vector<Golden> golden = {{"b_{2,2}", ball_form(2, 2), kPi},
                                      {"b_{3,2}", ball_form(3, 2), 4.0 * kPi / 3.0},
                                      {"x^4+y^4", powers_form(2, 4), kVolX4Y4}};
  for (const auto& g : golden) {
    const auto v = volume_laplace_mc(g.f, 400000, 11);
    const bool good = within_3sigma(v, g.truth);
    ok = ok && good;
    detail("%-8s %.6f +- %.1e vs %.6f %s", g.name, v.value, v.std_error, g.truth, good ? "ok" : "off");
  }
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = 1 + k % 3;
    const Matrix a = random_psd(static_cast<std::size_t>(n), 900 + k, 0.2);
    const Form q = form_from_gram(GramMatrix(n, 2, a));
    const auto v = volume_laplace_mc(q, 100000, 40 + k);
    worst = std::max(worst, rel(v.value, ball_volume(n) / std::sqrt(det(a))));
  }
  detail("20 random SPD quadratics: max rel error %.2e (limit 2e-2)", worst);
  ok = ok && worst <= 0.02;
  const double secs = seconds_since(t0);
  report("AC2", ok && secs < 30.0, secs, "golden volumes");
}

void ac3() {
  const auto t0 = Clock::now();
  const std::array<std::array<int, 2>, 10> shapes = {
      {{1, 2}, {1, 4}, {2, 2}, {2, 4}, {2, 6}, {3, 2}, {3, 4}, {3, 6}, {2, 4}, {3, 4}}};
  int bad = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto [n, d] = shapes[static_cast<std::size_t>(k % 10)];
    Form f = Form(n, d);
    if (k < 10) {
      f = form_from_gram(GramMatrix(n, d, random_psd(gram_dimension(n, d), 300 + k, 0.1)));
    } else {
      f = powers_form(n, d) + ball_form(n, d) * (0.1 * (k - 9));
    }
    const auto a = volume_laplace_mc(f, 200000, 70 + k);
    const auto b = volume_spherical_mc(f, 200000, 170 + k);
    const double tol = std::max(3.0 * std::hypot(a.std_error, b.std_error), 1e-12 * a.value);
    const double z = std::abs(a.value - b.value) / tol;
    worst_z = std::max(worst_z, z);
    if (z > 1.0) ++bad;
  }
  const double secs = seconds_since(t0);
  detail("20 forms, max |laplace - spherical| / (3 joint sigma) = %.2f, %d outside", worst_z, bad);
  report("AC3", bad == 0 && secs < 60.0, secs, "Laplace vs spherical estimators");
}

void ac4() {
  const auto t0 = Clock::now();
  const std::vector<NormSpec> norms = {NormSpec::bombieri(),    NormSpec::lp_sphere(1.0), NormSpec::lp_sphere(2.0),
                                       NormSpec::sup_sphere(),  NormSpec::nuclear(),      NormSpec::schatten(1.0),
                                       NormSpec::schatten(2.0), NormSpec::spectral()};
  const std::array<std::array<int, 2>, 3> cells = {{{2, 2}, {2, 4}, {3, 2}}};
  VerifyOptions o;
  o.trials = 500;
  int failed = 0;
  for (const auto& norm : norms)
    for (const auto [n, d] : cells) {
      const auto c0 = Clock::now();
      const auto r = verify_lower_bound(norm, n, d, o);
      if (!r.passed()) ++failed;
      std::string label = norm.name();
      if (norm.kind == NormKind::kLpSphere || norm.kind == NormKind::kSchatten)
        label += " p=" + std::to_string(static_cast<int>(norm.p));
      detail("%-12s (%d,%d) %s min ratio %.4f, %zu violations, %d infinite, %.1fs", label.c_str(), n, d,
             r.passed() ? "pass" : "FAIL", r.min_ratio, r.violations.size(), r.infinite_trials, seconds_since(c0));
    }
  const double secs = seconds_since(t0);
  report("AC4", failed == 0 && secs < 600.0, secs,
         "lower-bound verification matrix, " + std::to_string(failed) + " failing cells");
}

SolverTrace timed_solve(double& secs, auto&& run) {
  const auto t0 = Clock::now();
  SolverTrace t = run();
  secs = seconds_since(t0);
  return t;
}

void ac5() {
  double secs = 0.0;
  {
    SolverOptions o;
    o.start = powers_form(2, 4) + ball_form(2, 4) * 0.3;
    const auto t = timed_solve(secs, [&] { return minimize_volume_form(NormSpec::bombieri(), 2, 4, o); });
    const Form b = ball_form(2, 4);
    const double target = std::pow(8.0 / 3.0, 0.25) * kPi;
    const double dv = rel(t.final_objective.value, target);
    const double dist = bombieri_norm(t.final_form - b * (1.0 / bombieri_norm(b)));
    detail("v_T = %.5f vs %.5f (rel %.2e), distance to b/||b|| %.4f", t.final_objective.value, target, dv, dist);
    report("AC5a", dv <= 0.01 && dist <= 0.05 && secs < 300.0, secs, "Bombieri solver at (2,4)");
  }
  {
    SolverOptions o;
    o.start_gram = GramMatrix(2, 2, Matrix{{3.0, 0.5}, {0.5, 1.0}});
    const auto t = timed_solve(secs, [&] { return minimize_volume_sos(2.0, 2, 2, o); });
    const double target = std::sqrt(2.0) * kPi;
    const double dv = rel(t.final_objective.value, target);
    detail("v_T = %.5f vs %.5f (rel %.2e)", t.final_objective.value, target, dv);
    report("AC5b", dv <= 0.01 && secs < 300.0, secs, "Schatten-2 SOS solver at (2,2)");
  }
  {
    SolverOptions o;
    o.start = powers_form(2, 4) + ball_form(2, 4) * 0.3;
    const auto t = timed_solve(secs, [&] { return minimize_volume_form(NormSpec::l1_coeff(), 2, 4, o); });
    const auto c = monomial_from_rescaled(t.final_form);
    auto distance_to_powers = [&](double s) {
      double acc = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double target = (i == 0 || i + 1 == c.size()) ? s : 0.0;
        acc += (c[i] - target) * (c[i] - target);
      }
      return std::sqrt(acc);
    };
    const double dist = distance_to_powers(1.0 / std::sqrt(2.0));
    detail("coefficients [%.4f %.4f %.4f %.4f %.4f], v_T = %.5f", c[0], c[1], c[2], c[3], c[4],
           t.final_objective.value);
    detail("distance to (x^4+y^4)/sqrt2 %.4f; to (x^4+y^4)/2 %.4f (the l1-feasible multiple)", dist,
           distance_to_powers(0.5));
    report("AC5c", dist <= 0.05 && secs < 300.0, secs, "l1 solver at (2,4) against (x^4+y^4)/sqrt2");
  }
}

// Independent check of the normalization by uniform sampling on a box.
void ac6() {
  const auto t0 = Clock::now();
  bool ok = true;
  const std::array<std::array<int, 2>, 5> cells = {{{1, 2}, {1, 4}, {2, 2}, {2, 4}, {3, 2}}};
  for (const auto [n, d] : cells) {
    const double k = kappa(n, d);
    const double r = std::pow(40.0 / k, 1.0 / d);
    const double box = std::pow(2.0 * r, n);
    const std::uint64_t samples = 1000000;
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::uint64_t s = 0; s < samples; ++s) {
      CounterEngine e(derive_seed(61, static_cast<std::uint64_t>(10 * n + d)), s);
      double r2 = 0.0;
      for (auto& xi : x) {
        xi = (2.0 * (static_cast<double>(e() >> 11) * 0x1.0p-53) - 1.0) * r;
        r2 += xi * xi;
      }
      const double w = box * std::exp(-k * std::pow(r2, 0.5 * d));
      sum += w;
      sum2 += w * w;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
    const bool good = std::abs(mean - 1.0) <= 3.0 * se;
    ok = ok && good;
    detail("(%d,%d) integral %.5f +- %.1e %s", n, d, mean, se, good ? "ok" : "off");
  }
  double zero_err = 0.0;
  bool odd_zero = true;
  for (int n = 1; n <= 3; ++n)
    for (int d : {2, 4, 6}) {
      std::vector<int> alpha(static_cast<std::size_t>(n), 0);
      zero_err = std::max(zero_err, std::abs(gaussian_like_moment(alpha, n, d) - 1.0));
      for (int i = 0; i < n; ++i)
        for (int e : {1, 3, 5}) {
          alpha.assign(static_cast<std::size_t>(n), 2);
          alpha[static_cast<std::size_t>(i)] = e;
          odd_zero = odd_zero && gaussian_like_moment(alpha, n, d) == 0.0;
        }
    }
  detail("|moment(0) - 1| <= %.1e, odd moments %s", zero_err, odd_zero ? "exactly zero" : "nonzero");
  report("AC6", ok && zero_err <= 1e-10 && odd_zero, seconds_since(t0), "Gaussian-like normalization");
}

void ac7() {
  const auto t0 = Clock::now();
  double worst_orth = 0.0, worst_equiv = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 3;
    const int half = 1 + (k / 3) % 3;
    const auto rho = OrthogonalMatrix::random(n, 500 + k);
    const Matrix r = induced_representation(rho, half);
    worst_orth = std::max(worst_orth, orthogonality_defect(r));
    const GramMatrix g(n, 2 * half, random_symmetric(gram_dimension(n, 2 * half), 700 + k));
    const Form lhs = apply_orthogonal(form_from_gram(g), rho);
    const Form rhs = form_from_gram(GramMatrix(n, 2 * half, r.transpose() * g.entries() * r));
    for (std::size_t i = 0; i < lhs.size(); ++i) worst_equiv = std::max(worst_equiv, std::abs(lhs[i] - rhs[i]));
  }
  detail("50 rotations: orthogonality defect %.1e, equivariance error %.1e", worst_orth, worst_equiv);

  int bad = 0;
  for (int k = 0; k < 10; ++k) {
    const int n = 2 + k % 2;
    const int d = 2 + 2 * ((k / 2) % 2);
    const Form f = form_from_gram(GramMatrix(n, d, random_psd(gram_dimension(n, d), 1100 + k, 0.2)));
    LaplaceOptions opt;
    opt.samples = 20000;
    opt.seed = 1200 + k;
    const auto g = volume_gradient(f, opt);
    opt.reference_scale = g.reference_scale;
    opt.transform = g.transform;
    const double h = 1e-5;
    for (std::size_t a = 0; a < f.size(); ++a) {
      std::vector<double> e(f.size(), 0.0);
      e[a] = h;
      const Form step(n, d, e);
      const double fd = (volume_laplace_mc(f + step, opt).value - volume_laplace_mc(f - step, opt).value) / (2 * h);
      if (std::abs(fd - g.gradient[a]) > std::max(3.0 * g.std_error[a], 1e-3 * std::abs(g.gradient[a]))) ++bad;
    }
  }
  detail("gradient vs central differences on 10 SOS forms: %d coordinates out of tolerance", bad);
  report("AC7", worst_orth <= 1e-10 && worst_equiv <= 1e-9 && bad == 0, seconds_since(t0),
         "invariance structure and volume gradient");
}

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  status = pclose(p);
  return out;
}

void ac8() {
  const auto t0 = Clock::now();
  const std::string cli = FORMVOL_CLI_PATH;
  const std::vector<std::string> commands = {
      "volume --builtin powers --n 2 --d 4 --samples 20000 --seed 5",
      "volume --builtin powers --n 3 --d 4 --method spherical --samples 20000 --format csv",
      "norm --builtin powers --n 2 --d 4 --kind sup --seed 9",
      "norm --builtin powers --n 2 --d 6 --kind lp --p 3 --samples 20000",
      "optimize --norm bombieri --n 2 --d 2 --iters 20 --samples 2000 --eval-samples 10000 --seed 3",
      "optimize --sos --p 2 --n 2 --d 2 --iters 20 --samples 2000 --eval-samples 10000 --format csv",
      "verify --norm lp --p 2 --n 2 --d 4 --trials 30 --samples 5000 --threads 4",
      "verify --pstar --norm sup --n 2 --d 4 --samples 20000"};
  int differing = 0;
  for (const auto& c : commands) {
    int s1 = 0, s2 = 0;
    const std::string a = run_capture(cli + " " + c + " 2>&1", s1);
    const std::string b = run_capture(cli + " " + c + " 2>&1", s2);
    const bool same = s1 == s2 && a == b && !a.empty();
    if (!same) {
      ++differing;
      detail("differs: %s", c.c_str());
    }
  }
  detail("%zu commands run twice, %d differ", commands.size(), differing);
  report("AC8", differing == 0, seconds_since(t0), "CLI determinism");
}

}  // namespace

int main() {
  ac1();
  ac2();
  ac3();
  ac4();
  ac5();
  ac6();
  ac7();
  ac8();
  std::printf("%d criteria failed\n", failures);
  return failures;
}
