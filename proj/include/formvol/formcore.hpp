#pragma once

// Dense n-variate forms of fixed degree stored in the rescaled monomial basis
//
//   f(x) = sum_{|a| = d} f_a sqrt(multinomial(d; a)) x^a,
//
// in which the Bombieri inner product is the plain dot product of
// coefficient vectors and orthogonal changes of variables act orthogonally.
//
// Exponent vectors are ordered graded-lexicographically, descending in the
// first variable: for n = 2, d = 2 the order is x1^2, x1 x2, x2^2. Gram
// matrix layouts and every file format depend on this order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "formvol/matrix.hpp"

namespace formvol {

// C(n, k), exact in size_t; throws a capacity error on overflow.
std::size_t binomial(std::size_t n, std::size_t k);

// d! / (a_1! ... a_n!) as a double, built from a Pascal recurrence.
double multinomial(std::span<const int> alpha);

class MultiIndexTable {
 public:
  MultiIndexTable(int n, int d);

  int variables() const noexcept { return n_; }
  int degree() const noexcept { return d_; }
  std::size_t size() const noexcept { return size_; }

  std::span<const int> operator[](std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }

  // Position of `alpha` in the canonical order; alpha must have length n and
  // total degree d.
  std::size_t index_of(std::span<const int> alpha) const;

  // sqrt(multinomial(d; alpha_i)) for every entry, in table order.
  std::span<const double> sqrt_multinomials() const noexcept { return sqrt_mult_; }

 private:
  int n_;
  int d_;
  std::size_t size_;
  std::vector<int> flat_;
  std::vector<double> sqrt_mult_;
  // count_[k][r]: number of exponent vectors over k variables with sum r.
  std::vector<std::vector<std::size_t>> count_;
};

// Canonical table for (n, d). Tables are built once and shared; the returned
// reference stays valid for the lifetime of the process.
const MultiIndexTable& multi_index_table(int n, int d);

class Form {
 public:
  Form(int n, int d);  // zero form
  Form(int n, int d, std::vector<double> coeffs);

  int variables() const noexcept { return table_->variables(); }
  int degree() const noexcept { return table_->degree(); }
  std::size_t size() const noexcept { return coeffs_.size(); }
  const MultiIndexTable& table() const noexcept { return *table_; }

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }

  Form& operator+=(const Form& other);
  Form& operator-=(const Form& other);
  Form& operator*=(double s);
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(Form a, double s) { return a *= s; }
  friend Form operator*(double s, Form a) { return a *= s; }

  bool same_shape(const Form& other) const noexcept {
    return table_ == other.table_;
  }

 private:
  const MultiIndexTable* table_;
  std::vector<double> coeffs_;
};

Form rescaled_from_monomial(int n, int d, std::span<const double> monomial_coeffs);
std::vector<double> monomial_from_rescaled(const Form& f);

// b_{d,n}(x) = |x|^d; d must be even.
Form ball_form(int n, int d);

// x_1^d + ... + x_n^d.
Form powers_form(int n, int d);

double evaluate(const Form& f, std::span<const double> x);

double bombieri_product(const Form& f, const Form& g);
double bombieri_norm(const Form& f);

// ||b_{d,n}||_B = sqrt(prod_{i<d/2} (2i + n) / (2i + 1)).
double bombieri_norm_ball_exact(int n, int d);

// ||b_{d,n}||_* = ||b_{d,n}||_B^2.
double nuclear_norm_ball(int n, int d);

// (y . x)^d. Its Bombieri product with g equals g(y).
Form power_form(std::span<const double> y, int d);

struct PowerTerm {
  double weight;
  std::vector<double> direction;  // unit vector
};

// Sum of |weight| for a decomposition f = sum weight_k (y_k . x)^d. The
// decomposition is checked: directions must be unit and the reconstruction
// residual in Bombieri norm must not exceed `tol`.
double nuclear_upper_bound(std::span<const PowerTerm> terms, const Form& f, double tol = 1e-9);

// x -> f(M x).
Form compose_linear(const Form& f, const Matrix& m);

class OrthogonalMatrix {
 public:
  static constexpr double kTolerance = 1e-12;

  // Throws a domain error unless max|M M^t - I| <= kTolerance.
  explicit OrthogonalMatrix(Matrix m);

  static OrthogonalMatrix identity(int n);

  // Haar-distributed: QR of a Gaussian matrix with the R diagonal made
  // positive.
  static OrthogonalMatrix random(int n, std::uint64_t seed);

  int dimension() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }

 private:
  Matrix m_;
};

// (rho^* f)(x) = f(rho^{-1} x) = f(rho^t x).
Form apply_orthogonal(const Form& f, const OrthogonalMatrix& rho);

// Partial derivative in variable i, a form of degree d - 1. Requires d >= 1.
Form differentiate(const Form& f, int i);

// Precompiled monomial evaluation for hot loops (Monte Carlo, ascent).
class FormEvaluator {
 public:
  explicit FormEvaluator(const Form& f);

  int variables() const noexcept { return n_; }
  int degree() const noexcept { return d_; }

  double operator()(std::span<const double> x) const;

  // Evaluates every rescaled basis monomial sqrt(mult) x^a at x into `out`.
  void basis(std::span<const double> x, std::span<double> out) const;

 private:
  int n_;
  int d_;
  std::vector<double> coeffs_;  // monomial-basis coefficients
  std::vector<double> scale_;   // sqrt(multinomial)
  std::vector<int> exponents_;
};

// Value and gradient on top of `differentiate`.
class GradientEvaluator {
 public:
  explicit GradientEvaluator(const Form& f);

  double value(std::span<const double> x) const { return value_(x); }
  double value_and_gradient(std::span<const double> x, std::span<double> grad) const;

 private:
  FormEvaluator value_;
  std::vector<FormEvaluator> partials_;
};

}  // namespace formvol
