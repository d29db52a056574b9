#pragma once

#include <cstddef>
#include <vector>

#include "permalign/matrix.hpp"

namespace permalign {

/// Square matrix of pairwise assignment costs; entries must be finite.
using CostMatrix = Matrix;

/// Bijection on {0, ..., n-1}; mapping[i] is the image of i.
struct Permutation {
  std::vector<std::size_t> mapping;

  static Permutation identity(std::size_t n);

  std::size_t size() const { return mapping.size(); }
  std::size_t operator[](std::size_t i) const { return mapping[i]; }

  Permutation inverse() const;
  /// (this ∘ other): first apply other, then this.
  Permutation compose(const Permutation& other) const;

  bool is_identity() const;
  /// Throws ArgumentError unless mapping is a bijection.
  void validate() const;

  bool operator==(const Permutation& other) const = default;
};

struct LapResult {
  Permutation perm;
  /// Sum of cost(i, perm[i]); the exact minimum over permutations.
  double cost = 0.0;
};

/// Exact linear assignment via shortest augmenting paths with dual
/// potentials (Jonker-Volgenant family), O(n^3).
LapResult solve_lap(const CostMatrix& cost);

/// Exhaustive minimum over all n! permutations, n <= 8. Ties resolve to the
/// lexicographically smallest mapping. Test oracle for solve_lap.
LapResult brute_force_lap(const CostMatrix& cost);

/// C[i][j] = ||x_i - y_j||_2^2 between the rows of two equal-shape matrices,
/// computed by the Gram expansion; negatives from rounding clamp to zero.
CostMatrix pairwise_sq_dist(const Matrix& x, const Matrix& y);

/// Minimum mean p-th power pairing cost between the rows of x and y:
/// min_pi (1/m) sum_i ||x_i - y_pi(i)||_2^p. Equals wasserstein(x,y,p)^p.
double pairing_cost(const Matrix& x, const Matrix& y, int p);

/// Exact p-Wasserstein distance (p in {1,2}) between the empirical measures
/// of the rows of x and y, reduced to a linear assignment.
double wasserstein(const Matrix& x, const Matrix& y, int p);

}  // namespace permalign
