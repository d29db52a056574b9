#pragma once

#include <cstddef>
#include <vector>

#include "permalign/matrix.hpp"
#include "permalign/rng.hpp"

namespace permalign {

/// Block-diagonal covariance Diag(lambda_1 I_{p_1}, ..., lambda_k I_{p_k}).
/// Eigenvalues are listed per group, non-increasing; group sizes sum to the
/// ambient dimension.
struct CovarianceSpec {
  std::vector<std::size_t> group_sizes;
  std::vector<double> eigenvalues;

  std::size_t dimension() const;
  double eigenvalue_sum() const;

  /// n groups of size one, all eigenvalues equal to lambda.
  static CovarianceSpec isotropic(std::size_t n, double lambda);

  /// Throws ConfigError on empty/zero dimensions, negative eigenvalues,
  /// mismatched lengths, or eigenvalues out of order.
  void validate() const;
};

/// m i.i.d. rows from the centered Gaussian with the given block covariance.
Matrix gaussian_rows(std::size_t m, const CovarianceSpec& spec, RngState& rng);

/// m x n matrix of i.i.d. uniform entries on [-half_width, half_width].
Matrix uniform_rows(std::size_t m, std::size_t n, double half_width, RngState& rng);

}  // namespace permalign
