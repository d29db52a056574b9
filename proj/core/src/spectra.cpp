#include "permalign/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "permalign/errors.hpp"

namespace permalign {

namespace {

constexpr double kSymmetryTol = 1e-8;

void require_symmetric(const Matrix& s, const char* who) {
  if (!s.is_square()) throw ArgumentError(std::string(who) + ": matrix must be square");
  if (s.max_symmetry_gap() > kSymmetryTol * std::max(1.0, s.max_abs())) {
    throw ArgumentError(std::string(who) + ": matrix is not symmetric");
  }
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

Matrix second_moment(const Matrix& z) {
  if (z.cols() == 0 || z.rows() == 0) {
    throw ArgumentError("second_moment: sample matrix has no columns");
  }
  const double inv = 1.0 / static_cast<double>(z.cols());
  Matrix out(z.rows(), z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const double* zi = z.row_ptr(i);
    for (std::size_t j = i; j < z.rows(); ++j) {
      const double* zj = z.row_ptr(j);
      double s = 0.0;
      for (std::size_t k = 0; k < z.cols(); ++k) s += zi[k] * zj[k];
      s *= inv;
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

double approx_dim(const Matrix& s) {
  require_symmetric(s, "approx_dim");
  const double tr = s.trace();
  double tr2 = 0.0;
  for (double v : s.data()) tr2 += v * v;  // tr(S^2) = ||S||_F^2 for symmetric S
  if (tr2 == 0.0) throw DegenerateInputError("approx_dim: tr(S^2) vanishes");
  return tr * tr / tr2;
}

EigenDecomposition sym_eig(const Matrix& s) {
  require_symmetric(s, "sym_eig");
  const std::size_t n = s.rows();

  Matrix a = s;
  Matrix v = Matrix::identity(n);
  const double threshold = 1e-12 * std::max(1.0, s.frobenius_norm());

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Symmetric Schur rotation annihilating a(p,q).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

Matrix psd_sqrt(const Matrix& s) {
  EigenDecomposition eig = sym_eig(s);
  const std::size_t n = s.rows();
  for (double lambda : eig.values) {
    if (lambda < -1e-6) throw NotPsdError("psd_sqrt: matrix has a negative eigenvalue");
  }
  // B = V * Diag(sqrt(max(lambda, 0))), then R = B V^T, re-symmetrized.
  Matrix b = eig.vectors;
  for (std::size_t c = 0; c < n; ++c) {
    const double root = std::sqrt(std::max(eig.values[c], 0.0));
    for (std::size_t r = 0; r < n; ++r) b(r, c) *= root;
  }
  Matrix r = multiply_abt(b, eig.vectors);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (r(i, j) + r(j, i));
      r(i, j) = m;
      r(j, i) = m;
    }
  }
  return r;
}

}  // namespace permalign
