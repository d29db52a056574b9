#include "permalign/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "permalign/errors.hpp"

namespace permalign {

namespace {

std::vector<double> uniform_grid(std::size_t grid_size) {
  if (grid_size < 3) throw ArgumentError("grid must have at least 3 points");
  std::vector<double> grid(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(grid_size - 1);
  }
  return grid;
}

// Chunked evaluation keeps activation buffers small on large eval sets.
double evaluate_loss(const Architecture& arch, const MlpWeights& weights,
                     const Dataset& data, LossKind loss, std::size_t block = 1024) {
  const std::size_t count = data.count();
  double total = 0.0;
  std::vector<std::size_t> indices;
  for (std::size_t start = 0; start < count; start += block) {
    const std::size_t stop = std::min(count, start + block);
    indices.resize(stop - start);
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = start + i;
    const Batch batch = gather_batch(data, indices);
    const ActivationTrace trace = forward(arch, weights, batch.x);
    total += loss_value(trace.output, batch, loss) * static_cast<double>(indices.size());
  }
  return total / static_cast<double>(count);
}

}  // namespace

MlpWeights interpolate(const MlpWeights& a, const MlpWeights& b_perm, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("interpolate: t must lie in [0, 1]");
  if (a.layers.size() != b_perm.layers.size() || a.biases.size() != b_perm.biases.size()) {
    throw ArgumentError("interpolate: weight structures differ");
  }
  MlpWeights out;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    out.layers.push_back(convex_combination(a.layers[l], b_perm.layers[l], t));
  }
  for (std::size_t l = 0; l < a.biases.size(); ++l) {
    if (a.biases[l].size() != b_perm.biases[l].size()) {
      throw ArgumentError("interpolate: bias lengths differ");
    }
    std::vector<double> b(a.biases[l].size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = t * a.biases[l][i] + (1.0 - t) * b_perm.biases[l][i];
    }
    out.biases.push_back(std::move(b));
  }
  return out;
}

BarrierCurve barrier_curve(const Architecture& arch, const MlpWeights& a,
                           const MlpWeights& b_perm, const Dataset& eval_set,
                           LossKind loss, std::size_t grid_size) {
  eval_set.validate();
  BarrierCurve curve;
  curve.t_grid = uniform_grid(grid_size);
  curve.losses.reserve(grid_size);
  for (double t : curve.t_grid) {
    const MlpWeights mid = interpolate(a, b_perm, t);
    curve.losses.push_back(evaluate_loss(arch, mid, eval_set, loss));
  }
  curve.loss_b = curve.losses.front();  // t = 0 is B
  curve.loss_a = curve.losses.back();   // t = 1 is A
  double barrier = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < grid_size; ++i) {
    const double t = curve.t_grid[i];
    const double baseline = t * curve.loss_a + (1.0 - t) * curve.loss_b;
    barrier = std::max(barrier, curve.losses[i] - baseline);
  }
  curve.barrier_raw = barrier;
  curve.barrier_clamped = std::max(0.0, barrier);
  return curve;
}

LayerDeviationReport layer_deviations(const Architecture& arch, const MlpWeights& a,
                                      const MlpWeights& b_perm, const Matrix& eval_inputs,
                                      std::size_t grid_size) {
  if (eval_inputs.cols() == 0) throw ArgumentError("layer_deviations: empty eval set");
  const std::size_t depth = arch.depth();
  const double count = static_cast<double>(eval_inputs.cols());

  LayerDeviationReport report;
  report.t_grid = uniform_grid(grid_size);

  const ActivationTrace trace_a = forward(arch, a, eval_inputs);
  const ActivationTrace trace_b = forward(arch, b_perm, eval_inputs);

  report.energy_a.resize(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    const double norm = trace_a.hidden[l].frobenius_norm();
    report.energy_a[l] = norm * norm / (count * static_cast<double>(arch.dims[l + 1]));
  }

  for (double t : report.t_grid) {
    const MlpWeights mid = interpolate(a, b_perm, t);
    const ActivationTrace trace_m = forward(arch, mid, eval_inputs);
    std::vector<double> dev_a(depth), dev_b(depth);
    for (std::size_t l = 0; l < depth; ++l) {
      const double scale = count * static_cast<double>(arch.dims[l + 1]);
      double sa = 0.0, sb = 0.0;
      const auto& ma = trace_a.hidden[l].data();
      const auto& mb = trace_b.hidden[l].data();
      const auto& mm = trace_m.hidden[l].data();
      for (std::size_t i = 0; i < mm.size(); ++i) {
        const double da = ma[i] - mm[i];
        const double db = mb[i] - mm[i];
        sa += da * da;
        sb += db * db;
      }
      dev_a[l] = sa / scale;
      dev_b[l] = sb / scale;
    }
    report.dev_from_a.push_back(std::move(dev_a));
    report.dev_from_b.push_back(std::move(dev_b));
  }
  return report;
}

}  // namespace permalign
