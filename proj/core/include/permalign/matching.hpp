#pragma once

#include <vector>

#include "permalign/assignment.hpp"
#include "permalign/network.hpp"

namespace permalign {

/// One permutation per hidden layer; input and output layers carry implicit
/// identities and are never permuted.
struct PermutationStack {
  std::vector<Permutation> layers;

  static PermutationStack identity(const Architecture& arch);
  PermutationStack inverse() const;
  bool operator==(const PermutationStack& other) const = default;
};

enum class MatchKind { naive_wm, cov_wm, activation_m };

std::string to_string(MatchKind k);
MatchKind match_kind_from_string(const std::string& name);

/// Matching method plus the probe batch it may need. cov_wm and
/// activation_m require a non-empty probe (inputs as columns); naive_wm
/// ignores it.
struct MatchMethod {
  MatchKind kind = MatchKind::naive_wm;
  Matrix probe;

  static MatchMethod naive();
  static MatchMethod covariance(Matrix probe);
  static MatchMethod activation(Matrix probe);
};

/// Re-bases the network: W~^l = Pi_l W^l Pi_{l-1}^T (biases as Pi_l b^l).
/// The network function is unchanged.
MlpWeights apply_stack(const Architecture& arch, const MlpWeights& weights,
                       const PermutationStack& stack);

/// Greedy layer-by-layer alignment of B's hidden neurons onto A's, in order
/// l = 1..L with B's columns pre-permuted by the previous layer's choice.
/// Each layer solves an exact assignment on squared row distances:
///   naive_wm      on the raw weight rows,
///   cov_wm        on rows whitened by psd_sqrt of A's upstream activation
///                 second moment (the raw input moment at layer 1),
///   activation_m  on probe activations (B's are intrinsic, no upstream
///                 permutation applied).
PermutationStack match_layers(const Architecture& arch, const MlpWeights& a,
                              const MlpWeights& b, const MatchMethod& method);

/// Per-layer costs (all evaluated under the same stack, so methods are
/// comparable) and the participation-ratio dimensions of the three matrices
/// each method implicitly matches on.
struct LayerMatchReport {
  std::size_t layer = 0;      // 1-based hidden layer index
  double cost_naive = 0.0;    // ||W_A - Pi W_B Pi_prev^T||_F^2
  double cost_sigma = 0.0;    // same difference under the Sigma semi-norm
  double cost_activation = 0.0;
  double dim_w = 0.0;         // Dim(W_A W_A^T)
  double dim_w_sigma = 0.0;   // Dim(W_A Sigma_A^{l-1} W_A^T)
  double dim_sigma = 0.0;     // Dim(Sigma_A^l)
};

std::vector<LayerMatchReport> matching_report(const Architecture& arch,
                                              const MlpWeights& a, const MlpWeights& b,
                                              const PermutationStack& stack,
                                              const Matrix& probe);

/// The dimension columns alone (no second network needed).
struct LayerDims {
  std::size_t layer = 0;
  double dim_w = 0.0;
  double dim_w_sigma = 0.0;
  double dim_sigma = 0.0;
};

std::vector<LayerDims> dimension_table(const Architecture& arch, const MlpWeights& a,
                                       const Matrix& probe);

}  // namespace permalign
