#include "formvol/formcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <numeric>
#include <random>
#include <string>

#include "formvol/errors.hpp"
#include "formvol/random.hpp"

namespace formvol {
namespace {

// Pascal row s as doubles.
std::vector<double> pascal_row(int s) {
  std::vector<double> row(static_cast<std::size_t>(s) + 1, 0.0);
  row[0] = 1.0;
  for (int r = 1; r <= s; ++r)
    for (int k = r; k >= 1; --k) row[k] += row[k - 1];
  return row;
}

void require_even(int d, const char* what) {
  if (d < 0 || d % 2 != 0) fail(ErrorCode::kDomain, std::string(what) + ": degree must be even and nonnegative");
}

// Scratch buffer for x_i^k tables, stack-allocated for the common sizes.
class PowerTable {
 public:
  PowerTable(std::span<const double> x, int d) : stride_(d + 1) {
    const std::size_t need = x.size() * static_cast<std::size_t>(stride_);
    data_ = need <= stack_.size() ? stack_.data() : (heap_.resize(need), heap_.data());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double* p = data_ + i * stride_;
      p[0] = 1.0;
      for (int k = 1; k <= d; ++k) p[k] = p[k - 1] * x[i];
    }
  }
  double operator()(std::size_t i, int k) const { return data_[i * stride_ + k]; }

 private:
  std::size_t stride_;
  std::array<double, 256> stack_;
  std::vector<double> heap_;
  double* data_;
};

}  // namespace

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step.
    const std::size_t num = n - k + i;
    const std::size_t g = std::gcd(result, i);
    const std::size_t r = result / g;
    const std::size_t den = i / g;
    if (r > std::numeric_limits<std::size_t>::max() / num)
      fail(ErrorCode::kCapacity, "binomial coefficient overflows size_t");
    result = r * num / den;
  }
  return result;
}

double multinomial(std::span<const int> alpha) {
  int total = 0;
  for (int a : alpha) {
    if (a < 0) fail(ErrorCode::kDomain, "negative exponent");
    total += a;
  }
  double m = 1.0;
  int partial = 0;
  for (int a : alpha) {
    partial += a;
    m *= pascal_row(partial)[static_cast<std::size_t>(a)];
  }
  return m;
}

MultiIndexTable::MultiIndexTable(int n, int d) : n_(n), d_(d) {
  if (n < 1) fail(ErrorCode::kDomain, "a form needs at least one variable");
  if (d < 0) fail(ErrorCode::kDomain, "degree must be nonnegative");

  count_.assign(static_cast<std::size_t>(n) + 1, std::vector<std::size_t>(static_cast<std::size_t>(d) + 1, 0));
  count_[0][0] = 1;
  for (int k = 1; k <= n; ++k)
    for (int s = 0; s <= d; ++s)
      count_[k][s] = binomial(static_cast<std::size_t>(s + k - 1), static_cast<std::size_t>(k - 1));
  size_ = count_[n][d];
  if (size_ > std::numeric_limits<std::size_t>::max() / sizeof(double) / static_cast<std::size_t>(n))
    fail(ErrorCode::kCapacity, "multi-index table exceeds addressable size");

  try {
    flat_.reserve(size_ * static_cast<std::size_t>(n));
    sqrt_mult_.reserve(size_);
  } catch (const std::bad_alloc&) {
    fail(ErrorCode::kCapacity, "multi-index table exceeds available memory");
  }

  std::vector<int> alpha(static_cast<std::size_t>(n), 0);
  // First coordinate descending, then recursively on the rest.
  std::function<void(int, int)> fill = [&](int pos, int rem) {
    if (pos == n - 1) {
      alpha[pos] = rem;
      flat_.insert(flat_.end(), alpha.begin(), alpha.end());
      sqrt_mult_.push_back(std::sqrt(multinomial(alpha)));
      return;
    }
    for (int a = rem; a >= 0; --a) {
      alpha[pos] = a;
      fill(pos + 1, rem - a);
    }
  };
  fill(0, d);
}

std::size_t MultiIndexTable::index_of(std::span<const int> alpha) const {
  if (alpha.size() != static_cast<std::size_t>(n_)) fail(ErrorCode::kShape, "exponent vector has wrong length");
  std::size_t rank = 0;
  int rem = d_;
  for (int i = 0; i + 1 < n_; ++i) {
    const int a = alpha[i];
    if (a < 0 || a > rem) fail(ErrorCode::kShape, "exponent vector does not have the table degree");
    const int after = n_ - i - 1;
    // Entries with a larger exponent at position i come first.
    for (int b = a + 1; b <= rem; ++b) rank += count_[after][rem - b];
    rem -= a;
  }
  if (alpha[n_ - 1] != rem) fail(ErrorCode::kShape, "exponent vector does not have the table degree");
  return rank;
}

const MultiIndexTable& multi_index_table(int n, int d) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<const MultiIndexTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, d}];
  if (!slot) {
    try {
      slot = std::make_unique<const MultiIndexTable>(n, d);
    } catch (...) {
      cache.erase({n, d});
      throw;
    }
  }
  return *slot;
}

Form::Form(int n, int d) : table_(&multi_index_table(n, d)), coeffs_(table_->size(), 0.0) {}

Form::Form(int n, int d, std::vector<double> coeffs)
    : table_(&multi_index_table(n, d)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != table_->size())
    fail(ErrorCode::kShape, "coefficient vector has length " + std::to_string(coeffs_.size()) +
                                ", expected " + std::to_string(table_->size()));
}

Form& Form::operator+=(const Form& other) {
  if (!same_shape(other)) fail(ErrorCode::kShape, "forms differ in variables or degree");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

Form& Form::operator-=(const Form& other) {
  if (!same_shape(other)) fail(ErrorCode::kShape, "forms differ in variables or degree");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

Form& Form::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Form rescaled_from_monomial(int n, int d, std::span<const double> monomial_coeffs) {
  const auto& table = multi_index_table(n, d);
  if (monomial_coeffs.size() != table.size()) fail(ErrorCode::kShape, "monomial coefficient vector has wrong length");
  std::vector<double> f(table.size());
  const auto s = table.sqrt_multinomials();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = monomial_coeffs[i] / s[i];
  return Form(n, d, std::move(f));
}

std::vector<double> monomial_from_rescaled(const Form& f) {
  std::vector<double> c(f.size());
  const auto s = f.table().sqrt_multinomials();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = f[i] * s[i];
  return c;
}

Form ball_form(int n, int d) {
  require_even(d, "ball_form");
  const auto& half = multi_index_table(n, d / 2);
  const auto& full = multi_index_table(n, d);
  std::vector<double> f(full.size(), 0.0);
  std::vector<int> alpha(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < half.size(); ++k) {
    const auto beta = half[k];
    for (int i = 0; i < n; ++i) alpha[i] = 2 * beta[i];
    const std::size_t idx = full.index_of(alpha);
    f[idx] = multinomial(beta) / full.sqrt_multinomials()[idx];
  }
  return Form(n, d, std::move(f));
}

Form powers_form(int n, int d) {
  const auto& table = multi_index_table(n, d);
  std::vector<double> f(table.size(), 0.0);
  std::vector<int> alpha(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    std::fill(alpha.begin(), alpha.end(), 0);
    alpha[i] = d;
    f[table.index_of(alpha)] += 1.0;
  }
  return Form(n, d, std::move(f));
}

double evaluate(const Form& f, std::span<const double> x) { return FormEvaluator(f)(x); }

double bombieri_product(const Form& f, const Form& g) {
  if (!f.same_shape(g)) fail(ErrorCode::kShape, "Bombieri product of forms with different shapes");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s;
}

double bombieri_norm(const Form& f) { return std::sqrt(bombieri_product(f, f)); }

double nuclear_norm_ball(int n, int d) {
  require_even(d, "nuclear_norm_ball");
  if (n < 1) fail(ErrorCode::kDomain, "a form needs at least one variable");
  double p = 1.0;
  for (int i = 0; i < d / 2; ++i) p *= static_cast<double>(2 * i + n) / static_cast<double>(2 * i + 1);
  return p;
}

double bombieri_norm_ball_exact(int n, int d) { return std::sqrt(nuclear_norm_ball(n, d)); }

Form power_form(std::span<const double> y, int d) {
  const int n = static_cast<int>(y.size());
  const auto& table = multi_index_table(n, d);
  PowerTable pw(y, d);
  std::vector<double> f(table.size());
  const auto s = table.sqrt_multinomials();
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto alpha = table[k];
    double m = s[k];
    for (int i = 0; i < n; ++i) m *= pw(i, alpha[i]);
    f[k] = m;
  }
  return Form(n, d, std::move(f));
}

double nuclear_upper_bound(std::span<const PowerTerm> terms, const Form& f, double tol) {
  Form recon(f.variables(), f.degree());
  double total = 0.0;
  for (const auto& term : terms) {
    if (term.direction.size() != static_cast<std::size_t>(f.variables()))
      fail(ErrorCode::kShape, "decomposition direction has wrong dimension");
    double norm2 = 0.0;
    for (double v : term.direction) norm2 += v * v;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
      fail(ErrorCode::kInvalidCertificate, "decomposition direction is not a unit vector");
    recon += term.weight * power_form(term.direction, f.degree());
    total += std::abs(term.weight);
  }
  const double residual = bombieri_norm(recon - f);
  if (!(residual <= tol))
    fail(ErrorCode::kInvalidCertificate,
         "decomposition does not reconstruct the form (residual " + std::to_string(residual) + ")");
  return total;
}

Form compose_linear(const Form& f, const Matrix& m) {
  const int n = f.variables();
  const int d = f.degree();
  if (m.rows() != static_cast<std::size_t>(n) || m.cols() != static_cast<std::size_t>(n))
    fail(ErrorCode::kShape, "substitution matrix does not match the number of variables");

  // succ[k][idx * n + j]: index of (beta_idx + e_j) in the degree k + 1 table.
  std::vector<const MultiIndexTable*> tables(static_cast<std::size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) tables[k] = &multi_index_table(n, k);
  std::vector<std::vector<std::size_t>> succ(static_cast<std::size_t>(d));
  std::vector<int> beta(static_cast<std::size_t>(n));
  for (int k = 0; k < d; ++k) {
    const auto& t = *tables[k];
    succ[k].resize(t.size() * static_cast<std::size_t>(n));
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
      std::copy(t[idx].begin(), t[idx].end(), beta.begin());
      for (int j = 0; j < n; ++j) {
        ++beta[j];
        succ[k][idx * n + j] = tables[k + 1]->index_of(beta);
        --beta[j];
      }
    }
  }

  const auto& full = *tables[d];
  const auto s = full.sqrt_multinomials();
  std::vector<double> out(full.size(), 0.0);

  // Multiplies a dense degree-k polynomial by the linear form row_i . x.
  auto times_row = [&](const std::vector<double>& p, int k, int i) {
    std::vector<double> q(tables[k + 1]->size(), 0.0);
    const auto row = m.row(static_cast<std::size_t>(i));
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
      if (p[idx] == 0.0) continue;
      for (int j = 0; j < n; ++j)
        if (row[j] != 0.0) q[succ[k][idx * n + j]] += p[idx] * row[j];
    }
    return q;
  };

  // Depth-first over exponent prefixes so products of (row_i . x)^{a_i} are
  // shared between monomials with a common prefix.
  std::vector<int> alpha(static_cast<std::size_t>(n), 0);
  std::function<void(int, int, std::vector<double>)> expand = [&](int i, int rem, std::vector<double> p) {
    const int k = d - rem;
    if (i == n - 1) {
      for (int r = 0; r < rem; ++r) p = times_row(p, k + r, i);
      alpha[i] = rem;
      const std::size_t a = full.index_of(alpha);
      const double fa = f[a];
      if (fa == 0.0) return;
      // out_b += f_a * sqrt(mult_a) * coeff_b / sqrt(mult_b); the ratio is
      // exactly 1 when a == b, keeping the identity substitution exact.
      for (std::size_t b = 0; b < p.size(); ++b)
        if (p[b] != 0.0) out[b] += fa * (p[b] * (s[a] / s[b]));
      return;
    }
    for (int a = 0; a <= rem; ++a) {
      alpha[i] = a;
      expand(i + 1, rem - a, p);
      if (a < rem) p = times_row(p, k + a, i);
    }
  };
  expand(0, d, std::vector<double>{1.0});
  return Form(n, d, std::move(out));
}

OrthogonalMatrix::OrthogonalMatrix(Matrix m) : m_(std::move(m)) {
  if (!m_.square()) fail(ErrorCode::kShape, "orthogonal matrix must be square");
  const double defect = orthogonality_defect(m_);
  if (!(defect <= kTolerance))
    fail(ErrorCode::kDomain, "matrix is not orthogonal (max |M M^t - I| = " + std::to_string(defect) + ")");
}

OrthogonalMatrix OrthogonalMatrix::identity(int n) {
  return OrthogonalMatrix(Matrix::identity(static_cast<std::size_t>(n)));
}

OrthogonalMatrix OrthogonalMatrix::random(int n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::kDomain, "dimension must be at least 1");
  const auto un = static_cast<std::size_t>(n);
  CounterEngine engine(seed, 0);
  std::vector<std::vector<double>> cols(un, std::vector<double>(un));
  for (auto& c : cols) fill_normal(engine, c);
  // Modified Gram-Schmidt, two passes. Column norms are the (positive) R
  // diagonal, which fixes the signs and makes the result Haar distributed.
  for (std::size_t j = 0; j < un; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < un; ++i) dot += cols[k][i] * cols[j][i];
        for (std::size_t i = 0; i < un; ++i) cols[j][i] -= dot * cols[k][i];
      }
    double norm = 0.0;
    for (double v : cols[j]) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : cols[j]) v /= norm;
  }
  Matrix q(un, un);
  for (std::size_t i = 0; i < un; ++i)
    for (std::size_t j = 0; j < un; ++j) q(i, j) = cols[j][i];
  return OrthogonalMatrix(std::move(q));
}

Form apply_orthogonal(const Form& f, const OrthogonalMatrix& rho) {
  if (rho.dimension() != f.variables()) fail(ErrorCode::kShape, "rotation dimension does not match the form");
  return compose_linear(f, rho.matrix().transpose());
}

Form differentiate(const Form& f, int i) {
  const int n = f.variables();
  const int d = f.degree();
  if (d < 1) fail(ErrorCode::kDomain, "cannot differentiate a form of degree 0");
  if (i < 0 || i >= n) fail(ErrorCode::kShape, "variable index out of range");
  const auto& lower = multi_index_table(n, d - 1);
  const auto& table = f.table();
  std::vector<double> g(lower.size());
  std::vector<int> alpha(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < lower.size(); ++k) {
    const auto beta = lower[k];
    std::copy(beta.begin(), beta.end(), alpha.begin());
    ++alpha[i];
    // alpha_i c_alpha = (beta_i + 1) f_alpha sqrt(mult_d(alpha)) and
    // mult_d(alpha) / mult_{d-1}(beta) = d / (beta_i + 1).
    g[k] = f[table.index_of(alpha)] * std::sqrt(static_cast<double>(d) * (beta[i] + 1));
  }
  return Form(n, d - 1, std::move(g));
}

FormEvaluator::FormEvaluator(const Form& f) : n_(f.variables()), d_(f.degree()) {
  const auto& table = f.table();
  const auto s = table.sqrt_multinomials();
  coeffs_.resize(table.size());
  scale_.assign(s.begin(), s.end());
  exponents_.reserve(table.size() * static_cast<std::size_t>(n_));
  for (std::size_t k = 0; k < table.size(); ++k) {
    coeffs_[k] = f[k] * s[k];
    const auto a = table[k];
    exponents_.insert(exponents_.end(), a.begin(), a.end());
  }
}

double FormEvaluator::operator()(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(n_)) fail(ErrorCode::kShape, "point has wrong dimension");
  PowerTable pw(x, d_);
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k] == 0.0) continue;
    double term = coeffs_[k];
    const int* a = exponents_.data() + k * n_;
    for (int i = 0; i < n_; ++i) term *= pw(i, a[i]);
    sum += term;
  }
  return sum;
}

void FormEvaluator::basis(std::span<const double> x, std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(n_) || out.size() != scale_.size())
    fail(ErrorCode::kShape, "basis evaluation buffers have wrong size");
  PowerTable pw(x, d_);
  for (std::size_t k = 0; k < scale_.size(); ++k) {
    double term = scale_[k];
    const int* a = exponents_.data() + k * n_;
    for (int i = 0; i < n_; ++i) term *= pw(i, a[i]);
    out[k] = term;
  }
}

GradientEvaluator::GradientEvaluator(const Form& f) : value_(f) {
  if (f.degree() >= 1) {
    partials_.reserve(static_cast<std::size_t>(f.variables()));
    for (int i = 0; i < f.variables(); ++i) partials_.emplace_back(differentiate(f, i));
  }
}

double GradientEvaluator::value_and_gradient(std::span<const double> x, std::span<double> grad) const {
  if (grad.size() != x.size()) fail(ErrorCode::kShape, "gradient buffer has wrong size");
  if (partials_.empty()) {
    std::fill(grad.begin(), grad.end(), 0.0);
  } else {
    for (std::size_t i = 0; i < partials_.size(); ++i) grad[i] = partials_[i](x);
  }
  return value_(x);
}

}  // namespace formvol
