#include "formvol/sos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "formvol/errors.hpp"

namespace formvol {
namespace {

void require_even(int d) {
  if (d < 0 || d % 2 != 0) fail(ErrorCode::kDomain, "Gram matrices need an even degree");
}

// Index of b_i + b_j in the degree-d table and the factor
// sqrt(mult(b_i) mult(b_j)) / sqrt(mult(b_i + b_j)) for every pair (i, j).
struct GramMap {
  std::size_t dim = 0;
  std::vector<std::size_t> index;
  std::vector<double> weight;

  GramMap(int n, int d) {
    require_even(d);
    const auto& half = multi_index_table(n, d / 2);
    const auto& full = multi_index_table(n, d);
    dim = half.size();
    index.resize(dim * dim);
    weight.resize(dim * dim);
    std::vector<int> alpha(static_cast<std::size_t>(n));
    const auto sh = half.sqrt_multinomials();
    const auto sf = full.sqrt_multinomials();
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        for (int k = 0; k < n; ++k) alpha[k] = half[i][k] + half[j][k];
        const std::size_t a = full.index_of(alpha);
        index[i * dim + j] = a;
        weight[i * dim + j] = sh[i] * sh[j] / sf[a];
      }
  }
};

double symmetry_tolerance(const Matrix& m) {
  return GramMatrix::kSymmetryTolerance * std::max(1.0, m.max_abs());
}

Matrix symmetrized(const Matrix& m) {
  Matrix s = m;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

void require_symmetric(const Matrix& m) {
  if (!m.square()) fail(ErrorCode::kShape, "matrix is not square");
  const double asym = asymmetry(m);
  if (asym > symmetry_tolerance(m))
    fail(ErrorCode::kDomain, "matrix is not symmetric (max |G - G^t| = " + std::to_string(asym) + ")");
}

Matrix reconstruct(const Matrix& q, std::span<const double> values) {
  const std::size_t n = q.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < values.size(); ++k) s += q(i, k) * values[k] * q(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

// Projection of v onto {l >= 0, sum l <= 1}.
void project_capped_simplex(std::vector<double>& v) {
  double positive_sum = 0.0;
  for (double& x : v) {
    x = std::max(x, 0.0);
    positive_sum += x;
  }
  if (positive_sum <= 1.0) return;
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  for (double& x : v) x = std::max(x - tau, 0.0);
}

}  // namespace

std::size_t gram_dimension(int n, int d) {
  require_even(d);
  if (n < 1) fail(ErrorCode::kDomain, "a form needs at least one variable");
  return binomial(static_cast<std::size_t>(d / 2 + n - 1), static_cast<std::size_t>(n - 1));
}

GramMatrix::GramMatrix(int n, int d, Matrix entries) : n_(n), d_(d) {
  const std::size_t dim = gram_dimension(n, d);
  if (entries.rows() != dim || entries.cols() != dim)
    fail(ErrorCode::kShape, "Gram matrix must be " + std::to_string(dim) + " x " + std::to_string(dim));
  require_symmetric(entries);
  entries_ = symmetrized(entries);
}

GramMatrix GramMatrix::identity(int n, int d) {
  return GramMatrix(n, d, Matrix::identity(gram_dimension(n, d)));
}

GramMatrix GramMatrix::zero(int n, int d) {
  const std::size_t dim = gram_dimension(n, d);
  return GramMatrix(n, d, Matrix(dim, dim));
}

Form form_from_gram(const GramMatrix& g) {
  const GramMap map(g.variables(), g.degree());
  Form f(g.variables(), g.degree());
  std::vector<double> c(f.size(), 0.0);
  const Matrix& e = g.entries();
  for (std::size_t i = 0; i < map.dim; ++i)
    for (std::size_t j = 0; j < map.dim; ++j) {
      const std::size_t k = i * map.dim + j;
      c[map.index[k]] += e(i, j) * map.weight[k];
    }
  return Form(g.variables(), g.degree(), std::move(c));
}

Matrix gram_pullback(int n, int d, std::span<const double> form_gradient) {
  const GramMap map(n, d);
  if (form_gradient.size() != multi_index_table(n, d).size())
    fail(ErrorCode::kShape, "form gradient has wrong length");
  Matrix out(map.dim, map.dim);
  for (std::size_t i = 0; i < map.dim; ++i)
    for (std::size_t j = 0; j < map.dim; ++j) {
      const std::size_t k = i * map.dim + j;
      out(i, j) = form_gradient[map.index[k]] * map.weight[k];
    }
  return out;
}

GramMatrix gram_from_squares(int n, int d, std::span<const Form> squares) {
  const std::size_t dim = gram_dimension(n, d);
  Matrix g(dim, dim);
  for (const Form& s : squares) {
    if (s.variables() != n || s.degree() != d / 2)
      fail(ErrorCode::kShape, "square has the wrong number of variables or degree");
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) g(i, j) += s[i] * s[j];
  }
  return GramMatrix(n, d, std::move(g));
}

EigenDecomposition eigh(const Matrix& s) {
  require_symmetric(s);
  const std::size_t n = s.rows();
  Matrix a = symmetrized(s);
  Matrix v = Matrix::identity(n);

  const double scale = a.frobenius();
  for (int sweep = 0; sweep < 100 && scale > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-17 * scale) break;
    // Early sweeps skip small entries; later sweeps rotate everything.
    const double threshold = sweep < 3 ? 0.2 * std::sqrt(off) / static_cast<double>(n * n) : 0.0;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= threshold || apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double g = a(r, p), h = a(r, q);
            a(r, p) = a(p, r) = c * g - sn * h;
            a(r, q) = a(q, r) = sn * g + c * h;
          }
          const double g = v(r, p), h = v(r, q);
          v(r, p) = c * g - sn * h;
          v(r, q) = sn * g + c * h;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

double schatten_norm(const Matrix& g, double p) {
  if (std::isinf(p) && p > 0) return spectral_norm(g);
  if (!(p >= 1.0)) fail(ErrorCode::kDomain, "Schatten norm needs p >= 1");
  const auto eig = eigh(g);
  double s = 0.0;
  for (double l : eig.values) s += std::pow(std::abs(l), p);
  return std::pow(s, 1.0 / p);
}

double spectral_norm(const Matrix& g) {
  const auto eig = eigh(g);
  double m = 0.0;
  for (double l : eig.values) m = std::max(m, std::abs(l));
  return m;
}

Matrix project_psd_schatten_ball(const Matrix& s, double p) {
  const bool inf = std::isinf(p) && p > 0;
  if (!(inf || p == 1.0 || p == 2.0))
    fail(ErrorCode::kDomain, "projection supports p in {1, 2, inf} only");
  auto eig = eigh(s);
  auto& l = eig.values;
  if (p == 1.0) {
    project_capped_simplex(l);
  } else if (p == 2.0) {
    double norm2 = 0.0;
    for (double& x : l) {
      x = std::max(x, 0.0);
      norm2 += x * x;
    }
    if (norm2 > 1.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& x : l) x *= inv;
    }
  } else {
    for (double& x : l) x = std::clamp(x, 0.0, 1.0);
  }
  return reconstruct(eig.vectors, l);
}

GramMatrix project_psd_schatten_ball(const GramMatrix& g, double p) {
  return GramMatrix(g.variables(), g.degree(), project_psd_schatten_ball(g.entries(), p));
}

std::vector<Form> sos_decompose(const GramMatrix& g) {
  const auto eig = eigh(g.entries());
  const double lmax = eig.values.empty() ? 0.0 : std::max(eig.values.front(), 0.0);
  const double lmin = eig.values.empty() ? 0.0 : eig.values.back();
  if (lmin < -1e-9 * lmax || (lmax == 0.0 && lmin < 0.0))
    fail(ErrorCode::kDomain, "Gram matrix is not positive semidefinite (lambda_min = " + std::to_string(lmin) + ")");
  std::vector<Form> out;
  const std::size_t dim = g.dimension();
  for (std::size_t k = 0; k < dim; ++k) {
    const double l = eig.values[k];
    if (l <= 1e-12 * lmax) continue;
    const double root = std::sqrt(l);
    std::vector<double> c(dim);
    for (std::size_t i = 0; i < dim; ++i) c[i] = root * eig.vectors(i, k);
    out.emplace_back(g.variables(), g.degree() / 2, std::move(c));
  }
  return out;
}

Matrix induced_representation(const OrthogonalMatrix& rho, int half_d) {
  if (half_d < 0) fail(ErrorCode::kDomain, "half degree must be nonnegative");
  const int n = rho.dimension();
  const std::size_t dim = multi_index_table(n, half_d).size();
  Matrix r(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> e(dim, 0.0);
    e[j] = 1.0;
    const Form moved = apply_orthogonal(Form(n, half_d, std::move(e)), rho);
    for (std::size_t i = 0; i < dim; ++i) r(j, i) = moved[i];
  }
  return r;
}

}  // namespace formvol
