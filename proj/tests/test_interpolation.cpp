#include <doctest.h>

#include <cmath>

#include "permalign/errors.hpp"
#include "permalign/interpolation.hpp"
#include "permalign/matching.hpp"
#include "permalign/meanfield.hpp"

using namespace permalign;

namespace {

Architecture make_arch(std::vector<std::size_t> dims, Activation act = Activation::relu) {
  Architecture arch;
  arch.dims = std::move(dims);
  arch.activation = act;
  return arch;
}

MlpWeights random_net(const Architecture& arch, std::uint64_t seed) {
  RngState rng(seed);
  return init_weights(arch, InitSpec::gaussian_iid(), rng);
}

// Bounded synthetic regression set shared by the barrier experiments.
Dataset teacher_dataset(std::size_t dim, std::size_t count, std::uint64_t seed) {
  RngState rng(seed);
  Dataset data;
  data.inputs = sample_mean_field_inputs(dim, count, rng);
  data.targets = Matrix(1, count);
  std::vector<double> x(dim);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t r = 0; r < dim; ++r) x[r] = data.inputs(r, c);
    data.targets(0, c) = teacher_output(x.data(), dim);
  }
  return data;
}

Permutation random_permutation(std::size_t n, RngState& rng) {
  Permutation p = Permutation::identity(n);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(p.mapping[i - 1], p.mapping[rng.next_u64() % i]);
  }
  return p;
}

}  // namespace

TEST_CASE("interpolate endpoints and midpoint") {
  const Architecture arch = make_arch({2, 3, 1});
  const MlpWeights a = random_net(arch, 1);
  const MlpWeights b = random_net(arch, 2);
  CHECK(interpolate(a, b, 1.0) == a);
  CHECK(interpolate(a, b, 0.0) == b);

  MlpWeights wa, wb;
  wa.layers = {Matrix(1, 1, {2.0})};
  wb.layers = {Matrix(1, 1, {4.0})};
  CHECK(interpolate(wa, wb, 0.5).layers[0](0, 0) == doctest::Approx(3.0));

  CHECK_THROWS_AS(interpolate(a, b, -0.1), ArgumentError);
  CHECK_THROWS_AS(interpolate(a, b, 1.1), ArgumentError);
}

TEST_CASE("barrier of a network against itself vanishes") {
  const Architecture arch = make_arch({5, 8, 1});
  const MlpWeights a = random_net(arch, 3);
  const Dataset eval_set = teacher_dataset(5, 64, 4);
  const BarrierCurve curve = barrier_curve(arch, a, a, eval_set, LossKind::mse, 9);
  CHECK(std::fabs(curve.barrier_raw) <= 1e-9);
  CHECK(curve.barrier_clamped >= 0.0);
  for (double loss : curve.losses) CHECK(loss == doctest::Approx(curve.loss_a));
}

TEST_CASE("barrier endpoints equal the endpoint losses") {
  const Architecture arch = make_arch({5, 8, 1});
  const MlpWeights a = random_net(arch, 5);
  const MlpWeights b = random_net(arch, 6);
  const Dataset eval_set = teacher_dataset(5, 64, 7);
  const BarrierCurve curve = barrier_curve(arch, a, b, eval_set, LossKind::mse, 11);
  CHECK(curve.losses.front() == doctest::Approx(curve.loss_b).epsilon(1e-12));
  CHECK(curve.losses.back() == doctest::Approx(curve.loss_a).epsilon(1e-12));
  CHECK(curve.t_grid.front() == 0.0);
  CHECK(curve.t_grid.back() == 1.0);
}

TEST_CASE("a depth-zero network has no barrier under a convex loss") {
  const Architecture arch = make_arch({4, 1});
  const MlpWeights a = random_net(arch, 8);
  const MlpWeights b = random_net(arch, 9);
  const Dataset eval_set = teacher_dataset(4, 64, 10);
  const BarrierCurve curve = barrier_curve(arch, a, b, eval_set, LossKind::mse, 25);
  CHECK(curve.barrier_raw <= 1e-9);
}

TEST_CASE("barrier argument validation") {
  const Architecture arch = make_arch({2, 3, 1});
  const MlpWeights a = random_net(arch, 11);
  Dataset empty;
  empty.inputs = Matrix(2, 0);
  CHECK_THROWS_AS(barrier_curve(arch, a, a, empty, LossKind::mse, 9), ArgumentError);
  const Dataset ok = teacher_dataset(2, 8, 12);
  CHECK_THROWS_AS(barrier_curve(arch, a, a, ok, LossKind::mse, 2), ArgumentError);
}

TEST_CASE("re-basing a permuted clone recovers a zero barrier") {
  const Architecture arch = make_arch({4, 10, 6, 1});
  const MlpWeights a = random_net(arch, 13);
  RngState stack_rng(14);
  PermutationStack stack;
  for (std::size_t l = 1; l <= arch.depth(); ++l) {
    stack.layers.push_back(random_permutation(arch.dims[l], stack_rng));
  }
  const MlpWeights b = apply_stack(arch, a, stack);

  const PermutationStack recovered = match_layers(arch, a, b, MatchMethod::naive());
  const MlpWeights b_aligned = apply_stack(arch, b, recovered);
  const Dataset eval_set = teacher_dataset(4, 128, 15);
  const BarrierCurve curve = barrier_curve(arch, a, b_aligned, eval_set, LossKind::mse, 25);
  CHECK(std::fabs(curve.barrier_raw) <= 1e-6);
}

TEST_CASE("layer deviations vanish for identical networks and at t = 1") {
  const Architecture arch = make_arch({3, 6, 4, 2});
  const MlpWeights a = random_net(arch, 16);
  const MlpWeights b = random_net(arch, 17);
  RngState rng(18);
  const Matrix inputs = sample_mean_field_inputs(3, 32, rng);

  const LayerDeviationReport self = layer_deviations(arch, a, a, inputs, 5);
  for (const auto& per_layer : self.dev_from_a) {
    for (double v : per_layer) CHECK(v <= 1e-20);
  }

  const LayerDeviationReport cross = layer_deviations(arch, a, b, inputs, 5);
  for (double v : cross.dev_from_a.back()) CHECK(v <= 1e-20);  // t = 1 is A
  for (double v : cross.dev_from_b.front()) CHECK(v <= 1e-20); // t = 0 is B
  for (double v : cross.energy_a) CHECK(v >= 0.0);
}

TEST_CASE("matched deviations shrink with width") {
  RngState seeds(19);
  double mean_small = 0.0, mean_large = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    for (const std::size_t width : {std::size_t(64), std::size_t(1024)}) {
      const Architecture arch = make_arch({5, width, 1});
      const MlpWeights a = random_net(arch, 1000 + static_cast<std::uint64_t>(seed));
      const MlpWeights b = random_net(arch, 2000 + static_cast<std::uint64_t>(seed));
      const PermutationStack stack = match_layers(arch, a, b, MatchMethod::naive());
      const MlpWeights b_aligned = apply_stack(arch, b, stack);
      RngState rng(3000 + static_cast<std::uint64_t>(seed));
      const Matrix inputs = sample_mean_field_inputs(5, 128, rng);
      const LayerDeviationReport report = layer_deviations(arch, a, b_aligned, inputs, 11);
      double worst = 0.0;
      for (const auto& per_layer : report.dev_from_a) worst = std::max(worst, per_layer[0]);
      (width == 64 ? mean_small : mean_large) += worst / 10.0;
    }
  }
  CHECK(mean_large < mean_small);
}

TEST_CASE("alignment helps at initialization") {
  const Dataset eval_set = teacher_dataset(5, 128, 20);
  int barrier_wins = 0;
  int deviation_wins = 0;
  for (int seed = 0; seed < 10; ++seed) {
    const Architecture arch = make_arch({5, 512, 1});
    const MlpWeights a = random_net(arch, 5000 + static_cast<std::uint64_t>(seed));
    const MlpWeights b = random_net(arch, 6000 + static_cast<std::uint64_t>(seed));
    const PermutationStack stack = match_layers(arch, a, b, MatchMethod::naive());
    const MlpWeights b_aligned = apply_stack(arch, b, stack);

    const double matched =
        barrier_curve(arch, a, b_aligned, eval_set, LossKind::mse, 13).barrier_clamped;
    const double unmatched =
        barrier_curve(arch, a, b, eval_set, LossKind::mse, 13).barrier_clamped;
    if (matched <= unmatched) ++barrier_wins;

    // The mid-path activation gap is the quantity alignment directly shrinks.
    const auto dev_of = [&](const MlpWeights& b_variant) {
      const LayerDeviationReport r =
          layer_deviations(arch, a, b_variant, eval_set.inputs, 13);
      double worst = 0.0;
      for (const auto& per_layer : r.dev_from_a) worst = std::max(worst, per_layer[0]);
      return worst;
    };
    if (dev_of(b_aligned) < dev_of(b)) ++deviation_wins;
  }
  CHECK(barrier_wins >= 9);
  CHECK(deviation_wins >= 9);
}
