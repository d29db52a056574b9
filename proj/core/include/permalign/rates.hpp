#pragma once

#include <cstddef>
#include <vector>

#include "permalign/matrix.hpp"
#include "permalign/rng.hpp"
#include "permalign/sampling.hpp"

namespace permalign {

struct RatePoint {
  std::size_t m = 0;
  double mean_cost = 0.0;
  double std_err = 0.0;
};

/// Log-log least-squares fit through (m, mean_cost) points.
struct RateFit {
  std::vector<RatePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares on (ln m, ln mean_cost). Needs at least two
/// points with positive costs and strictly increasing m.
RateFit fit_slope(const std::vector<RatePoint>& points);

/// Row distribution for the rate sweeps: block-covariance Gaussian or
/// i.i.d. uniform entries.
struct SampleLaw {
  enum class Kind { gaussian, uniform };
  Kind kind = Kind::gaussian;
  CovarianceSpec cov;
  std::size_t dim = 0;
  double half_width = 0.0;

  static SampleLaw gaussian(CovarianceSpec spec);
  static SampleLaw uniform(std::size_t n, double half_width);

  std::size_t dimension() const;
  Matrix sample(std::size_t m, RngState& rng) const;
};

struct RateOptions {
  std::vector<std::size_t> m_values;  // strictly increasing, >= 3 entries
  std::size_t trials = 0;             // >= 3
  std::size_t threads = 1;

  void validate() const;
};

/// Fit plus the per-trial costs behind each point, kept for diagnostics.
struct RateSweep {
  RateFit fit;
  std::vector<std::vector<double>> trial_costs;  // [m index][trial]
};

/// Squared 2-Wasserstein distance between the row measures of two
/// independent m-samples from the law. The shared kernel of every sweep.
double two_sample_w2_squared(const Matrix& x, const Matrix& y);

/// Mean two-sample W_2^2 against m, fitted on log-log axes. Trials run on
/// worker threads with child seeds indexed by (m index * trials + trial),
/// so results are bit-identical for any thread count.
RateSweep empirical_rate(const SampleLaw& law, const RateOptions& opts, RngState rng);

/// Same sweep under the approximately-low-dimensional covariance model:
/// k leading unit eigenvalues and an (n-k)-dimensional tail sized so the
/// tail-to-head mass ratio equals eta. Valid while m stays below eta^-k.
struct LowDimSweep {
  RateSweep sweep;
  CovarianceSpec spec;
  double eta = 0.0;
  double regime_max_m = 0.0;  // eta^-k
};

LowDimSweep lowdim_rate(std::size_t n, std::size_t k, double eta,
                        const RateOptions& opts, RngState rng);

/// Matched row-distance sweep for the lower-bound check: rows drawn from
/// N(0, I_n/n) and paired by an exact assignment; with an isotropic input
/// second moment the objective reduces to the same two-sample W_2^2.
RateSweep lower_bound_rate(std::size_t n, const RateOptions& opts, RngState rng);

/// Compares plain matching with matching restricted to the first n_eff
/// coordinates (the exact change of basis for a rank-n_eff diagonal
/// projector). Both costs are evaluated in the restricted semi-norm; the
/// restricted argmin dominates instance by instance.
struct GainSweep {
  RateSweep naive;
  RateSweep weighted;
};

GainSweep gain_rates(std::size_t n, std::size_t n_eff, const RateOptions& opts,
                     RngState rng);

}  // namespace permalign
