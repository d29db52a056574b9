#include "permalign/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "permalign/errors.hpp"

namespace permalign {

Permutation Permutation::identity(std::size_t n) {
  Permutation p;
  p.mapping.resize(n);
  std::iota(p.mapping.begin(), p.mapping.end(), 0);
  return p;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.mapping.resize(mapping.size());
  for (std::size_t i = 0; i < mapping.size(); ++i) inv.mapping[mapping[i]] = i;
  return inv;
}

Permutation Permutation::compose(const Permutation& other) const {
  if (mapping.size() != other.mapping.size()) {
    throw ArgumentError("compose: size mismatch");
  }
  Permutation out;
  out.mapping.resize(mapping.size());
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    out.mapping[i] = mapping[other.mapping[i]];
  }
  return out;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    if (mapping[i] != i) return false;
  }
  return true;
}

void Permutation::validate() const {
  std::vector<bool> seen(mapping.size(), false);
  for (std::size_t v : mapping) {
    if (v >= mapping.size() || seen[v]) {
      throw ArgumentError("permutation mapping is not a bijection");
    }
    seen[v] = true;
  }
}

namespace {

void require_cost_matrix(const CostMatrix& cost, const char* who) {
  if (!cost.is_square() || cost.rows() == 0) {
    throw ArgumentError(std::string(who) + ": cost matrix must be square and non-empty");
  }
  if (!cost.all_finite()) {
    throw ArgumentError(std::string(who) + ": cost matrix has a non-finite entry");
  }
}

double permutation_cost(const CostMatrix& cost, const Permutation& perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) total += cost(i, perm[i]);
  return total;
}

}  // namespace

LapResult solve_lap(const CostMatrix& cost) {
  require_cost_matrix(cost, "solve_lap");
  const std::size_t n = cost.rows();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Shortest augmenting path with dual potentials, one row at a time.
  // Index 0 is a virtual column; real columns are 1..n. Columns outside the
  // alternating tree live in a compacted scan list so each Dijkstra step
  // touches only candidates that can still improve.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> assigned(n + 1, 0), way(n + 1, 0);
  std::vector<std::size_t> scan, tree;
  scan.reserve(n);
  tree.reserve(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    assigned[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    scan.resize(n);
    std::iota(scan.begin(), scan.end(), std::size_t{1});
    tree.clear();
    do {
      tree.push_back(j0);
      const std::size_t i0 = assigned[j0];
      const double* row = cost.row_ptr(i0 - 1);
      const double ui0 = u[i0];
      double delta = kInf;
      std::size_t best = 0;
      for (std::size_t pos = 0; pos < scan.size(); ++pos) {
        const std::size_t j = scan[pos];
        const double reduced = row[j - 1] - ui0 - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          best = pos;
        }
      }
      const std::size_t j1 = scan[best];
      for (const std::size_t j : tree) {
        u[assigned[j]] += delta;
        v[j] -= delta;
      }
      for (const std::size_t j : scan) minv[j] -= delta;
      scan[best] = scan.back();
      scan.pop_back();
      j0 = j1;
    } while (assigned[j0] != 0);
    // Unwind the alternating path.
    do {
      const std::size_t j1 = way[j0];
      assigned[j0] = assigned[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  LapResult out;
  out.perm.mapping.resize(n);
  for (std::size_t j = 1; j <= n; ++j) out.perm.mapping[assigned[j] - 1] = j - 1;
  out.cost = permutation_cost(cost, out.perm);
  return out;
}

LapResult brute_force_lap(const CostMatrix& cost) {
  require_cost_matrix(cost, "brute_force_lap");
  const std::size_t n = cost.rows();
  if (n > 8) throw SizeError("brute_force_lap: supports n <= 8");

  Permutation candidate = Permutation::identity(n);
  LapResult best{candidate, permutation_cost(cost, candidate)};
  // next_permutation enumerates lexicographically, so keeping strict
  // improvements leaves the lexicographically smallest optimum.
  while (std::next_permutation(candidate.mapping.begin(), candidate.mapping.end())) {
    const double c = permutation_cost(cost, candidate);
    if (c < best.cost) best = LapResult{candidate, c};
  }
  return best;
}

CostMatrix pairwise_sq_dist(const Matrix& x, const Matrix& y) {
  if (!x.same_shape(y)) throw ArgumentError("pairwise_sq_dist: shape mismatch");
  if (x.rows() == 0) throw ArgumentError("pairwise_sq_dist: empty input");
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();

  std::vector<double> xsq(m, 0.0), ysq(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* xi = x.row_ptr(i);
    const double* yi = y.row_ptr(i);
    for (std::size_t k = 0; k < n; ++k) {
      xsq[i] += xi[k] * xi[k];
      ysq[i] += yi[k] * yi[k];
    }
  }

  CostMatrix c = multiply_abt(x, y);
  for (std::size_t i = 0; i < m; ++i) {
    double* row = c.row_ptr(i);
    for (std::size_t j = 0; j < m; ++j) {
      row[j] = std::max(0.0, xsq[i] + ysq[j] - 2.0 * row[j]);
    }
  }
  return c;
}

double pairing_cost(const Matrix& x, const Matrix& y, int p) {
  if (p != 1 && p != 2) throw ConfigError("pairing cost: p must be 1 or 2");
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ArgumentError("pairing cost: shape mismatch");
  }
  if (x.rows() < 1) throw ArgumentError("pairing cost: need at least one row");
  CostMatrix c = pairwise_sq_dist(x, y);
  if (p == 1) {
    for (double& v : c.data()) v = std::sqrt(v);
  }
  const LapResult lap = solve_lap(c);
  return lap.cost / static_cast<double>(x.rows());
}

double wasserstein(const Matrix& x, const Matrix& y, int p) {
  const double mean_cost = pairing_cost(x, y, p);
  return p == 1 ? mean_cost : std::sqrt(mean_cost);
}

}  // namespace permalign
