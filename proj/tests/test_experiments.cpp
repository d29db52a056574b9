#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "permalign/dropout.hpp"
#include "permalign/errors.hpp"
#include "permalign/meanfield.hpp"
#include "permalign/rates.hpp"

using namespace permalign;

namespace {

RateOptions small_sweep(std::vector<std::size_t> m_values, std::size_t trials,
                        std::size_t threads = 2) {
  RateOptions opts;
  opts.m_values = std::move(m_values);
  opts.trials = trials;
  opts.threads = threads;
  return opts;
}

std::vector<double> medians(const RateSweep& sweep) {
  std::vector<double> out;
  for (std::vector<double> costs : sweep.trial_costs) {
    std::sort(costs.begin(), costs.end());
    const std::size_t n = costs.size();
    out.push_back(n % 2 == 1 ? costs[n / 2] : 0.5 * (costs[n / 2 - 1] + costs[n / 2]));
  }
  return out;
}

}  // namespace

TEST_CASE("fit_slope recovers exact power laws") {
  const RateFit inverse = fit_slope({{1, 1.0, 0.0}, {2, 0.5, 0.0}, {4, 0.25, 0.0}});
  CHECK(inverse.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(inverse.r_squared == doctest::Approx(1.0));

  const RateFit two_points = fit_slope({{1, 1.0, 0.0}, {10, 0.1, 0.0}});
  CHECK(two_points.slope == doctest::Approx(-1.0).epsilon(1e-9));

  const RateFit flat = fit_slope({{2, 3.0, 0.0}, {4, 3.0, 0.0}, {8, 3.0, 0.0}});
  CHECK(flat.slope == doctest::Approx(0.0));
  CHECK(flat.r_squared == doctest::Approx(1.0));

  CHECK_THROWS_AS(fit_slope({{1, 1.0, 0.0}, {2, 0.0, 0.0}, {3, 1.0, 0.0}}), ArgumentError);
  CHECK_THROWS_AS(fit_slope({{1, 1.0, 0.0}}), ArgumentError);
  CHECK_THROWS_AS(fit_slope({{2, 1.0, 0.0}, {2, 1.0, 0.0}}), ArgumentError);
}

TEST_CASE("two-sample cost of identical samples is zero") {
  RngState rng(1);
  const Matrix x = gaussian_rows(16, CovarianceSpec::isotropic(3, 1.0), rng);
  CHECK(two_sample_w2_squared(x, x) == 0.0);
}

TEST_CASE("rate sweeps are reproducible for any thread count") {
  const SampleLaw law = SampleLaw::gaussian(CovarianceSpec::isotropic(2, 1.0));
  const RateSweep serial = empirical_rate(law, small_sweep({8, 16, 32}, 4, 1), RngState(9));
  const RateSweep threaded = empirical_rate(law, small_sweep({8, 16, 32}, 4, 4), RngState(9));
  CHECK(serial.trial_costs == threaded.trial_costs);
  CHECK(serial.fit.slope == threaded.fit.slope);

  const RateSweep again = empirical_rate(law, small_sweep({8, 16, 32}, 4, 2), RngState(9));
  CHECK(serial.trial_costs == again.trial_costs);
}

TEST_CASE("rate sweep option validation") {
  const SampleLaw law = SampleLaw::gaussian(CovarianceSpec::isotropic(2, 1.0));
  CHECK_THROWS_AS(empirical_rate(law, small_sweep({8, 16}, 4), RngState(0)), ArgumentError);
  CHECK_THROWS_AS(empirical_rate(law, small_sweep({8, 16, 16}, 4), RngState(0)),
                  ArgumentError);
  CHECK_THROWS_AS(empirical_rate(law, small_sweep({8, 16, 32}, 2), RngState(0)),
                  ArgumentError);
}

TEST_CASE("lowdim with k = n reduces exactly to the isotropic sweep") {
  const RateOptions opts = small_sweep({8, 16, 32}, 4);
  const LowDimSweep low = lowdim_rate(3, 3, 0.5, opts, RngState(77));
  const RateSweep plain =
      empirical_rate(SampleLaw::gaussian(CovarianceSpec::isotropic(3, 1.0)), opts,
                     RngState(77));
  CHECK(low.sweep.trial_costs == plain.trial_costs);
  CHECK(low.eta == 0.0);
}

TEST_CASE("lowdim with a zero tail behaves like the head dimension") {
  const RateOptions opts = small_sweep({16, 32, 64, 128}, 8);
  const LowDimSweep padded = lowdim_rate(6, 2, 0.0, opts, RngState(5));
  const RateSweep head =
      empirical_rate(SampleLaw::gaussian(CovarianceSpec::isotropic(2, 1.0)), opts,
                     RngState(6));
  CHECK(std::fabs(padded.sweep.fit.slope - head.fit.slope) <= 0.5);
  CHECK(padded.regime_max_m == std::numeric_limits<double>::infinity());
}

TEST_CASE("lowdim regime boundary reports eta^-k") {
  const LowDimSweep low = lowdim_rate(10, 2, 1e-3, small_sweep({8, 16, 32}, 3), RngState(1));
  CHECK(low.eta == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(low.regime_max_m == doctest::Approx(1e6).epsilon(1e-6));
  CHECK_THROWS_AS(lowdim_rate(4, 5, 0.1, small_sweep({8, 16, 32}, 3), RngState(1)),
                  ConfigError);
}

TEST_CASE("lower-bound sweep matches the closed form at m = 1") {
  const RateSweep sweep = lower_bound_rate(2, small_sweep({1, 2, 4}, 64), RngState(3));
  // Mean squared distance between two independent N(0, I/2) rows is 2.
  CHECK(std::fabs(sweep.fit.points[0].mean_cost - 2.0) <= 1.0);
}

TEST_CASE("lower-bound medians are non-increasing in m") {
  const RateSweep sweep = lower_bound_rate(2, small_sweep({16, 32, 64, 128}, 10), RngState(8));
  const std::vector<double> med = medians(sweep);
  int inversions = 0;
  for (std::size_t i = 1; i < med.size(); ++i) {
    if (med[i] > med[i - 1]) ++inversions;
  }
  CHECK(inversions <= 1);
}

TEST_CASE("empirical_rate accepts the uniform sub-Gaussian law") {
  const SampleLaw law = SampleLaw::uniform(3, 1.0);
  const RateSweep sweep = empirical_rate(law, small_sweep({16, 32, 64}, 4), RngState(21));
  for (const RatePoint& p : sweep.fit.points) CHECK(p.mean_cost > 0.0);
  CHECK(sweep.fit.slope < 0.0);
  CHECK_THROWS_AS(SampleLaw::uniform(3, 0.0), ConfigError);
}

TEST_CASE("gain with n_eff = n gives bit-identical sweeps") {
  const GainSweep sweep = gain_rates(3, 3, small_sweep({8, 16, 32}, 4), RngState(12));
  CHECK(sweep.naive.trial_costs == sweep.weighted.trial_costs);
}

TEST_CASE("gain restricted argmin dominates instance by instance") {
  const GainSweep sweep = gain_rates(5, 2, small_sweep({8, 16, 32, 64}, 6), RngState(13));
  for (std::size_t mi = 0; mi < sweep.naive.trial_costs.size(); ++mi) {
    for (std::size_t t = 0; t < sweep.naive.trial_costs[mi].size(); ++t) {
      CHECK(sweep.weighted.trial_costs[mi][t] <= sweep.naive.trial_costs[mi][t]);
    }
  }

  const GainSweep again = gain_rates(5, 2, small_sweep({8, 16, 32, 64}, 6), RngState(13));
  CHECK(sweep.naive.trial_costs == again.naive.trial_costs);
  CHECK(sweep.weighted.trial_costs == again.weighted.trial_costs);
}

TEST_CASE("dropout gap hand cases") {
  Architecture arch;
  arch.dims = {2, 2, 1};
  arch.activation = Activation::relu;

  // Equal rows drop to zero error and zero bound.
  MlpWeights equal;
  equal.layers = {Matrix(2, 2, {0.3, -0.2, 0.3, -0.2}), Matrix(1, 2, {0.5, 0.5})};
  Matrix x(2, 3, {0.1, -0.4, 0.2, 0.3, 0.1, -0.2});
  const DropoutGap zero = dropout_gap(arch, equal, x);
  CHECK(zero.drop_error == 0.0);
  CHECK(zero.w1_bound == 0.0);

  // Two distinct neurons, one input: |s(w1 x) - s(w2 x)| / 2 by hand.
  MlpWeights two;
  two.layers = {Matrix(2, 2, {1.0, 0.0, 0.0, 1.0}), Matrix(1, 2, {0.5, 0.5})};
  Matrix single(2, 1, {0.6, -0.8});
  const DropoutGap gap = dropout_gap(arch, two, single);
  const double s1 = std::max(0.0, 0.6);
  const double s2 = std::max(0.0, -0.8);
  CHECK(gap.drop_error == doctest::Approx(std::fabs(s1 - s2) / 2.0));
  CHECK(gap.w1_bound == doctest::Approx(std::sqrt(2.0)));
  CHECK(gap.drop_error <= gap.w1_bound + 1e-9);

  Architecture odd;
  odd.dims = {2, 3, 1};
  MlpWeights odd_w;
  odd_w.layers = {Matrix(3, 2), Matrix(1, 3, {1.0 / 3, 1.0 / 3, 1.0 / 3})};
  CHECK_THROWS_AS(dropout_gap(odd, odd_w, x), ArgumentError);

  Architecture sig = arch;
  sig.activation = Activation::sigmoid;
  CHECK_THROWS_AS(dropout_gap(sig, equal, x), ArgumentError);
}

TEST_CASE("dropout inequality holds on random networks with unit-ball inputs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngState rng(seed);
    const std::size_t d = 2 + rng.next_u64() % 5;
    const std::size_t width = 2 * (2 + rng.next_u64() % 15);
    Architecture arch;
    arch.dims = {d, width, 1};
    arch.activation = seed % 2 == 0 ? Activation::relu : Activation::tanh;

    MlpWeights w = init_weights(arch, InitSpec::gaussian_iid(), rng);
    for (double& v : w.layers[1].data()) v = 1.0 / static_cast<double>(width);

    Matrix inputs(d, 64);
    for (std::size_t c = 0; c < 64; ++c) {
      double norm2 = 0.0;
      for (std::size_t r = 0; r < d; ++r) {
        inputs(r, c) = rng.next_gaussian();
        norm2 += inputs(r, c) * inputs(r, c);
      }
      // Scale into the unit ball.
      const double scale = rng.next_unit() / std::max(1.0, std::sqrt(norm2));
      for (std::size_t r = 0; r < d; ++r) inputs(r, c) *= scale;
    }
    const DropoutGap gap = dropout_gap(arch, w, inputs);
    CHECK(gap.drop_error <= gap.w1_bound + 1e-9);
  }
}

TEST_CASE("identical streams produce identical particle networks") {
  MeanFieldConfig cfg;
  cfg.input_dim = 3;
  cfg.width = 32;
  cfg.total_time = 0.5;
  cfg.step_size = 0.05;
  cfg.eval_size = 16;

  RngState init_a(1), init_b(1);
  ParticleNet a = init_particles(cfg, init_a);
  ParticleNet b = init_particles(cfg, init_b);
  a = train_particles(cfg, std::move(a), RngState(2), RngState(3));
  b = train_particles(cfg, std::move(b), RngState(2), RngState(3));
  CHECK(a.w == b.w);
  CHECK(a.a == b.a);

  // With A = B the linear path stays on the network itself.
  std::vector<double> x(cfg.input_dim, 0.25);
  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    ParticleNet mid;
    mid.activation = a.activation;
    mid.w = convex_combination(a.w, b.w, t);
    mid.a = a.a;
    const double expected = t * a.output(x.data()) + (1.0 - t) * b.output(x.data());
    CHECK(std::fabs(mid.output(x.data()) - expected) <= 1e-12);
  }
}

TEST_CASE("mean-field report is reproducible and internally consistent") {
  MeanFieldConfig cfg;
  cfg.input_dim = 3;
  cfg.width = 64;
  cfg.total_time = 1.0;
  cfg.step_size = 0.05;
  cfg.eval_size = 64;
  cfg.grid_size = 9;

  const MeanFieldReport r1 = meanfield_lmc(cfg, RngState(33));
  const MeanFieldReport r2 = meanfield_lmc(cfg, RngState(33));
  CHECK(r1.deviation_matched == r2.deviation_matched);
  CHECK(r1.barrier_matched == r2.barrier_matched);
  CHECK(r1.w2sq_matched == r2.w2sq_matched);

  CHECK(r1.deviation_matched >= 0.0);
  CHECK(r1.deviation_identity >= 0.0);
  CHECK(r1.w2sq_matched <= r1.w2sq_identity + 1e-12);
  CHECK(r1.steps == 20);

  MeanFieldConfig relu_cfg = cfg;
  relu_cfg.activation = Activation::relu;
  CHECK_THROWS_AS(meanfield_lmc(relu_cfg, RngState(0)), ConfigError);
}

TEST_CASE("matching the hidden units tightens the output deviation") {
  MeanFieldConfig cfg;
  cfg.input_dim = 4;
  cfg.width = 256;
  cfg.total_time = 2.0;
  cfg.step_size = 0.02;
  cfg.eval_size = 256;
  cfg.grid_size = 13;

  int matched_wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MeanFieldReport report = meanfield_lmc(cfg, RngState(900).child(seed));
    if (report.deviation_matched <= report.deviation_identity) ++matched_wins;
  }
  CHECK(matched_wins >= 9);
}

TEST_CASE("shared initial draw couples the two networks at time zero") {
  MeanFieldConfig cfg;
  cfg.input_dim = 2;
  cfg.width = 16;
  cfg.total_time = 0.05;
  cfg.step_size = 0.05;  // a single step
  cfg.eval_size = 32;
  cfg.grid_size = 5;
  cfg.shared_init = true;
  const MeanFieldReport shared = meanfield_lmc(cfg, RngState(44));

  cfg.shared_init = false;
  const MeanFieldReport independent = meanfield_lmc(cfg, RngState(44));
  CHECK(shared.w2sq_identity < independent.w2sq_identity);
}
