#pragma once

#include <vector>

#include "permalign/network.hpp"

namespace permalign {

/// Convex combination M_t with weight t on A: every matrix and bias is
/// t*A + (1-t)*B_perm. t must lie in [0, 1].
MlpWeights interpolate(const MlpWeights& a, const MlpWeights& b_perm, double t);

/// Loss along the linear path between A (t=1) and permuted B (t=0), with
/// the matching baseline t*loss_A + (1-t)*loss_B. The raw barrier is the
/// largest baseline gap over the interior grid points (the endpoints match
/// the baseline exactly by construction) and may be negative.
struct BarrierCurve {
  std::vector<double> t_grid;  // sorted, includes 0 and 1
  std::vector<double> losses;
  double loss_a = 0.0;
  double loss_b = 0.0;
  double barrier_raw = 0.0;      // max over 0 < t < 1 of loss(t) - baseline(t)
  double barrier_clamped = 0.0;  // max(0, barrier_raw)
};

/// Evaluates the full eval set at `grid_size` uniform t values (>= 3).
BarrierCurve barrier_curve(const Architecture& arch, const MlpWeights& a,
                           const MlpWeights& b_perm, const Dataset& eval_set,
                           LossKind loss, std::size_t grid_size = 25);

/// Monte-Carlo estimates of the per-layer mean-square activation deviations
/// between the endpoint networks and the interpolated one, plus the
/// per-layer activation energy of A. All values normalized by layer width.
struct LayerDeviationReport {
  std::vector<double> t_grid;
  std::vector<double> energy_a;                  // per layer: (1/m_l) E ||phi_A^l||^2
  std::vector<std::vector<double>> dev_from_a;   // [t][layer]
  std::vector<std::vector<double>> dev_from_b;   // [t][layer]
};

LayerDeviationReport layer_deviations(const Architecture& arch, const MlpWeights& a,
                                      const MlpWeights& b_perm, const Matrix& eval_inputs,
                                      std::size_t grid_size = 25);

}  // namespace permalign
