#pragma once

#include <vector>

#include "permalign/matrix.hpp"

namespace permalign {

/// Uncentered second moment (1/s) * Z * Z^T of an m x s sample matrix.
/// The result is exactly symmetric and PSD up to rounding.
Matrix second_moment(const Matrix& z);

/// Participation-ratio dimension tr(S)^2 / tr(S^2) of a symmetric matrix.
/// Lies in [1, rank(S)] for PSD input; scale invariant.
double approx_dim(const Matrix& s);

struct EigenDecomposition {
  /// Columns are orthonormal eigenvectors, ordered like `values`.
  Matrix vectors;
  /// Eigenvalues sorted non-increasing.
  std::vector<double> values;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps rotate away every off-diagonal pair until the off-diagonal
/// Frobenius norm falls below 1e-12 relative to the input scale, capped at
/// 100 sweeps. Quadratic convergence makes the cap generous for the matrix
/// sizes this library handles (<= ~1024).
EigenDecomposition sym_eig(const Matrix& s);

/// Symmetric PSD square root via sym_eig. Eigenvalues below -1e-6 raise
/// NotPsdError; small negatives from rounding are clamped to zero.
Matrix psd_sqrt(const Matrix& s);

}  // namespace permalign
