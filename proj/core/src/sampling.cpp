#include "permalign/sampling.hpp"

#include <cmath>

#include "permalign/errors.hpp"

namespace permalign {

std::size_t CovarianceSpec::dimension() const {
  std::size_t n = 0;
  for (std::size_t p : group_sizes) n += p;
  return n;
}

double CovarianceSpec::eigenvalue_sum() const {
  double s = 0.0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    s += static_cast<double>(group_sizes[g]) * eigenvalues[g];
  }
  return s;
}

CovarianceSpec CovarianceSpec::isotropic(std::size_t n, double lambda) {
  CovarianceSpec spec;
  spec.group_sizes.assign(n, 1);
  spec.eigenvalues.assign(n, lambda);
  return spec;
}

void CovarianceSpec::validate() const {
  if (group_sizes.empty()) throw ConfigError("covariance spec has no groups");
  if (group_sizes.size() != eigenvalues.size()) {
    throw ConfigError("covariance spec: one eigenvalue per group required");
  }
  for (std::size_t p : group_sizes) {
    if (p == 0) throw ConfigError("covariance spec: zero-sized group");
  }
  for (std::size_t g = 0; g < eigenvalues.size(); ++g) {
    if (!(eigenvalues[g] >= 0.0)) {
      throw ConfigError("covariance spec: negative eigenvalue");
    }
    if (g > 0 && eigenvalues[g] > eigenvalues[g - 1]) {
      throw ConfigError("covariance spec: eigenvalues must be non-increasing");
    }
  }
}

Matrix gaussian_rows(std::size_t m, const CovarianceSpec& spec, RngState& rng) {
  spec.validate();
  if (m < 1) throw ArgumentError("gaussian_rows: need at least one row");
  const std::size_t n = spec.dimension();

  std::vector<double> sigma(n);
  std::size_t at = 0;
  for (std::size_t g = 0; g < spec.group_sizes.size(); ++g) {
    const double sd = std::sqrt(spec.eigenvalues[g]);
    for (std::size_t k = 0; k < spec.group_sizes[g]; ++k) sigma[at++] = sd;
  }

  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.row_ptr(i);
    for (std::size_t j = 0; j < n; ++j) row[j] = sigma[j] * rng.next_gaussian();
  }
  return out;
}

Matrix uniform_rows(std::size_t m, std::size_t n, double half_width, RngState& rng) {
  if (!(half_width > 0.0)) throw ConfigError("uniform_rows: half_width must be positive");
  if (m < 1 || n < 1) throw ArgumentError("uniform_rows: empty shape");
  Matrix out(m, n);
  for (double& v : out.data()) v = rng.next_uniform(-half_width, half_width);
  return out;
}

}  // namespace permalign
