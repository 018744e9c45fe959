#pragma once

// Sum-of-squares representations. A Gram matrix G of a degree-d form f is
// indexed by the canonical table of degree d/2 and satisfies
//
//   f(x) = m(x)^t G m(x),   m(x)_i = sqrt(multinomial(d/2; b_i)) x^{b_i}.
//
// Because the rescaled monomials are Bombieri-orthonormal, an orthogonal
// change of variables rho acts on Gram matrices by conjugation with an
// orthogonal N x N matrix R(rho) (see induced_representation).

#include <cstddef>
#include <span>
#include <vector>

#include "formvol/formcore.hpp"
#include "formvol/matrix.hpp"

namespace formvol {

// C(d/2 + n - 1, n - 1); d must be even.
std::size_t gram_dimension(int n, int d);

class GramMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  // `entries` must be N x N with N = gram_dimension(n, d) and symmetric up to
  // kSymmetryTolerance (scaled by max(1, max|G|)). It is stored symmetrized.
  GramMatrix(int n, int d, Matrix entries);

  static GramMatrix identity(int n, int d);
  static GramMatrix zero(int n, int d);

  int variables() const noexcept { return n_; }
  int degree() const noexcept { return d_; }
  std::size_t dimension() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }

 private:
  int n_;
  int d_;
  Matrix entries_;
};

// m(x)^t G m(x) in the rescaled basis of degree d. Linear in G.
Form form_from_gram(const GramMatrix& g);

// Adjoint of form_from_gram: given df (the gradient of a function of the
// form's coefficients), returns the symmetric matrix of partial derivatives
// with respect to the Gram entries.
Matrix gram_pullback(int n, int d, std::span<const double> form_gradient);

// sum_i s_i s_i^t over the coefficient vectors of forms of degree d/2.
GramMatrix gram_from_squares(int n, int d, std::span<const Form> squares);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k is the eigenvector of values[k]
};

// Cyclic Jacobi eigensolver for symmetric matrices.
EigenDecomposition eigh(const Matrix& s);

double schatten_norm(const Matrix& g, double p);
double spectral_norm(const Matrix& g);

// Euclidean projection onto {G : G PSD, ||G||_p <= 1} for p in {1, 2, inf}.
//
// Both constraints are spectral (they only see the eigenvalues), so the
// projection keeps the eigenvectors and projects the eigenvalue vector onto
// {l >= 0, ||l||_p <= 1}: clamp negatives, then simplex projection (p = 1),
// radial rescale (p = 2) or clipping to [0, 1] (p = inf).
Matrix project_psd_schatten_ball(const Matrix& s, double p);
GramMatrix project_psd_schatten_ball(const GramMatrix& g, double p);

// Forms s_k of degree d/2 with sum s_k^2 = form_from_gram(g), from the rows
// of Lambda^{1/2} Q^t. Eigenvalues down to -1e-9 lambda_max are treated as
// zero; numerically null directions are dropped.
std::vector<Form> sos_decompose(const GramMatrix& g);

// R(rho) with m(rho^{-1} x) = R m(x) for the degree half_d rescaled
// monomial vector m. Row j holds the coefficients of rho^* m_j, so that
// rho^* (m^t G m) = m^t (R^t G R) m.
Matrix induced_representation(const OrthogonalMatrix& rho, int half_d);

}  // namespace formvol
