#pragma once

#include "permalign/network.hpp"

namespace permalign {

/// Gap between a two-layer averaging network and its first-half sub-network,
/// against the 1-Wasserstein distance between the two half-populations of
/// first-layer rows.
struct DropoutGap {
  double drop_error = 0.0;  // E_x |(2/N) sum_{i<N/2} s(w_i x) - (1/N) sum_i s(w_i x)|
  double w1_bound = 0.0;    // W_1(first-half rows, second-half rows)
};

/// Requires a one-hidden-layer network with even width, scalar output layer
/// with every weight equal to 1/N, and a 1-Lipschitz activation (relu or
/// tanh). When the eval inputs lie in the unit ball, drop_error <= w1_bound.
DropoutGap dropout_gap(const Architecture& arch, const MlpWeights& weights,
                       const Matrix& eval_inputs);

}  // namespace permalign
