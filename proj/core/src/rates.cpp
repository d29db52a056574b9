#include "permalign/rates.hpp"

#include <cmath>
#include <limits>

#include "permalign/assignment.hpp"
#include "permalign/errors.hpp"
#include "permalign/parallel.hpp"

namespace permalign {

RateFit fit_slope(const std::vector<RatePoint>& points) {
  if (points.size() < 2) throw ArgumentError("fit_slope: need at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].mean_cost > 0.0)) {
      throw ArgumentError("fit_slope: mean costs must be positive");
    }
    if (i > 0 && points[i].m <= points[i - 1].m) {
      throw ArgumentError("fit_slope: m values must be strictly increasing");
    }
  }

  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const RatePoint& p : points) {
    const double x = std::log(static_cast<double>(p.m));
    const double y = std::log(p.mean_cost);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  RateFit fit;
  fit.points = points;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;

  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / n;
  for (const RatePoint& p : points) {
    const double x = std::log(static_cast<double>(p.m));
    const double y = std::log(p.mean_cost);
    const double fitted = fit.intercept + fit.slope * x;
    ss_res += (y - fitted) * (y - fitted);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  fit.r_squared = std::min(1.0, std::max(0.0, fit.r_squared));
  return fit;
}

SampleLaw SampleLaw::gaussian(CovarianceSpec spec) {
  spec.validate();
  SampleLaw law;
  law.kind = Kind::gaussian;
  law.dim = spec.dimension();
  law.cov = std::move(spec);
  return law;
}

SampleLaw SampleLaw::uniform(std::size_t n, double half_width) {
  if (n == 0) throw ConfigError("sample law: zero dimension");
  if (!(half_width > 0.0)) throw ConfigError("sample law: half_width must be positive");
  SampleLaw law;
  law.kind = Kind::uniform;
  law.dim = n;
  law.half_width = half_width;
  return law;
}

std::size_t SampleLaw::dimension() const { return dim; }

Matrix SampleLaw::sample(std::size_t m, RngState& rng) const {
  if (kind == Kind::gaussian) return gaussian_rows(m, cov, rng);
  return uniform_rows(m, dim, half_width, rng);
}

void RateOptions::validate() const {
  if (m_values.size() < 3) throw ArgumentError("rate sweep: need at least three m values");
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    if (m_values[i] == 0) throw ArgumentError("rate sweep: m must be positive");
    if (i > 0 && m_values[i] <= m_values[i - 1]) {
      throw ArgumentError("rate sweep: m values must be strictly increasing");
    }
  }
  if (trials < 3) throw ArgumentError("rate sweep: need at least three trials");
}

double two_sample_w2_squared(const Matrix& x, const Matrix& y) {
  return pairing_cost(x, y, 2);
}

namespace {

RateSweep reduce_sweep(const std::vector<std::size_t>& m_values, std::size_t trials,
                       std::vector<std::vector<double>> costs) {
  RateSweep sweep;
  std::vector<RatePoint> points;
  for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
    double mean = 0.0;
    for (double c : costs[mi]) mean += c;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double c : costs[mi]) var += (c - mean) * (c - mean);
    var /= static_cast<double>(trials - 1);
    points.push_back(RatePoint{m_values[mi], mean,
                               std::sqrt(var / static_cast<double>(trials))});
  }
  sweep.trial_costs = std::move(costs);
  sweep.fit = fit_slope(points);
  return sweep;
}

}  // namespace

RateSweep empirical_rate(const SampleLaw& law, const RateOptions& opts, RngState rng) {
  opts.validate();
  const std::size_t trials = opts.trials;
  std::vector<std::vector<double>> costs(opts.m_values.size(),
                                         std::vector<double>(trials, 0.0));
  parallel_for(opts.m_values.size() * trials, opts.threads, [&](std::size_t task) {
    const std::size_t mi = task / trials;
    const std::size_t trial = task % trials;
    RngState local = rng.child(task);
    const Matrix x = law.sample(opts.m_values[mi], local);
    const Matrix y = law.sample(opts.m_values[mi], local);
    costs[mi][trial] = two_sample_w2_squared(x, y);
  });
  return reduce_sweep(opts.m_values, trials, std::move(costs));
}

LowDimSweep lowdim_rate(std::size_t n, std::size_t k, double eta,
                        const RateOptions& opts, RngState rng) {
  if (k == 0 || k > n) throw ConfigError("lowdim_rate: need 1 <= k <= n");
  if (!(eta >= 0.0)) throw ConfigError("lowdim_rate: eta must be non-negative");

  LowDimSweep out;
  out.spec.group_sizes.assign(n, 1);
  out.spec.eigenvalues.assign(n, 1.0);
  if (k < n) {
    // Tail eigenvalues sized so sqrt(tail mass) / (4 sqrt(head mass)) = eta.
    const double tail = 16.0 * eta * eta * static_cast<double>(k) /
                        static_cast<double>(n - k);
    for (std::size_t j = k; j < n; ++j) out.spec.eigenvalues[j] = tail;
  }
  const double head = static_cast<double>(k);
  double tail_mass = 0.0;
  for (std::size_t j = k; j < n; ++j) tail_mass += out.spec.eigenvalues[j];
  out.eta = std::sqrt(tail_mass) / (4.0 * std::sqrt(head));
  out.regime_max_m =
      out.eta > 0.0 ? std::pow(out.eta, -static_cast<double>(k))
                    : std::numeric_limits<double>::infinity();
  out.sweep = empirical_rate(SampleLaw::gaussian(out.spec), opts, rng);
  return out;
}

RateSweep lower_bound_rate(std::size_t n, const RateOptions& opts, RngState rng) {
  if (n == 0) throw ConfigError("lower_bound_rate: zero dimension");
  const SampleLaw law =
      SampleLaw::gaussian(CovarianceSpec::isotropic(n, 1.0 / static_cast<double>(n)));
  return empirical_rate(law, opts, rng);
}

GainSweep gain_rates(std::size_t n, std::size_t n_eff, const RateOptions& opts,
                     RngState rng) {
  if (n_eff == 0 || n_eff > n) throw ConfigError("gain_rates: need 1 <= n_eff <= n");
  opts.validate();
  const SampleLaw law =
      SampleLaw::gaussian(CovarianceSpec::isotropic(n, 1.0 / static_cast<double>(n)));

  const std::size_t trials = opts.trials;
  std::vector<std::vector<double>> naive_costs(opts.m_values.size(),
                                               std::vector<double>(trials, 0.0));
  std::vector<std::vector<double>> weighted_costs = naive_costs;

  parallel_for(opts.m_values.size() * trials, opts.threads, [&](std::size_t task) {
    const std::size_t mi = task / trials;
    const std::size_t trial = task % trials;
    const std::size_t m = opts.m_values[mi];
    RngState local = rng.child(task);
    const Matrix wa = law.sample(m, local);
    const Matrix wb = law.sample(m, local);

    // Restriction to the leading n_eff coordinates realizes the projector
    // semi-norm exactly.
    Matrix wa_head(m, n_eff), wb_head(m, n_eff);
    for (std::size_t i = 0; i < m; ++i) {
      std::copy_n(wa.row_ptr(i), n_eff, wa_head.row_ptr(i));
      std::copy_n(wb.row_ptr(i), n_eff, wb_head.row_ptr(i));
    }

    const CostMatrix cost_head = pairwise_sq_dist(wa_head, wb_head);
    const Permutation pi_naive = solve_lap(pairwise_sq_dist(wa, wb)).perm;
    const LapResult weighted = solve_lap(cost_head);

    double naive_in_head = 0.0;
    for (std::size_t i = 0; i < m; ++i) naive_in_head += cost_head(i, pi_naive[i]);

    naive_costs[mi][trial] = naive_in_head / static_cast<double>(m);
    weighted_costs[mi][trial] = weighted.cost / static_cast<double>(m);
  });

  GainSweep out;
  out.naive = reduce_sweep(opts.m_values, trials, std::move(naive_costs));
  out.weighted = reduce_sweep(opts.m_values, trials, std::move(weighted_costs));
  return out;
}

}  // namespace permalign
