#include "permalign/matching.hpp"

#include <cmath>

#include "permalign/errors.hpp"
#include "permalign/spectra.hpp"

namespace permalign {

PermutationStack PermutationStack::identity(const Architecture& arch) {
  PermutationStack s;
  for (std::size_t l = 1; l <= arch.depth(); ++l) {
    s.layers.push_back(Permutation::identity(arch.dims[l]));
  }
  return s;
}

PermutationStack PermutationStack::inverse() const {
  PermutationStack s;
  for (const Permutation& p : layers) s.layers.push_back(p.inverse());
  return s;
}

std::string to_string(MatchKind k) {
  switch (k) {
    case MatchKind::naive_wm: return "naive_wm";
    case MatchKind::cov_wm: return "cov_wm";
    case MatchKind::activation_m: return "activation_m";
  }
  throw ArgumentError("unknown match kind");
}

MatchKind match_kind_from_string(const std::string& name) {
  if (name == "naive_wm") return MatchKind::naive_wm;
  if (name == "cov_wm") return MatchKind::cov_wm;
  if (name == "activation_m") return MatchKind::activation_m;
  throw ConfigError("unknown matching method '" + name + "'");
}

MatchMethod MatchMethod::naive() { return MatchMethod{}; }

MatchMethod MatchMethod::covariance(Matrix probe) {
  return MatchMethod{MatchKind::cov_wm, std::move(probe)};
}

MatchMethod MatchMethod::activation(Matrix probe) {
  return MatchMethod{MatchKind::activation_m, std::move(probe)};
}

namespace {

// out.row(i) = in.row(perm[i])
Matrix permute_rows(const Matrix& in, const Permutation& perm) {
  Matrix out(in.rows(), in.cols());
  for (std::size_t i = 0; i < in.rows(); ++i) {
    const double* src = in.row_ptr(perm[i]);
    std::copy(src, src + in.cols(), out.row_ptr(i));
  }
  return out;
}

// out.col(j) = in.col(perm[j])
Matrix permute_cols(const Matrix& in, const Permutation& perm) {
  Matrix out(in.rows(), in.cols());
  for (std::size_t i = 0; i < in.rows(); ++i) {
    const double* src = in.row_ptr(i);
    double* dst = out.row_ptr(i);
    for (std::size_t j = 0; j < in.cols(); ++j) dst[j] = src[perm[j]];
  }
  return out;
}

void check_stack(const Architecture& arch, const PermutationStack& stack) {
  if (stack.layers.size() != arch.depth()) {
    throw ArgumentError("permutation stack depth does not match architecture");
  }
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    if (stack.layers[l].size() != arch.dims[l + 1]) {
      throw ArgumentError("permutation size does not match layer width");
    }
    stack.layers[l].validate();
  }
}

void check_weights(const Architecture& arch, const MlpWeights& w) {
  if (w.layers.size() != arch.num_weight_layers()) {
    throw ArgumentError("weights do not match architecture depth");
  }
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    if (w.layers[l].rows() != arch.dims[l + 1] || w.layers[l].cols() != arch.dims[l]) {
      throw ArgumentError("weight matrix shape does not match architecture");
    }
  }
  if (arch.use_bias && w.biases.size() != arch.num_weight_layers()) {
    throw ArgumentError("bias vectors do not match architecture depth");
  }
}

// Weight rows used in the matching costs; the bias joins as one extra
// column so the assignment sees the full per-neuron parameter vector.
Matrix rows_with_bias(const Matrix& weights, const std::vector<double>* bias) {
  if (!bias) return weights;
  Matrix out(weights.rows(), weights.cols() + 1);
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    const double* src = weights.row_ptr(i);
    double* dst = out.row_ptr(i);
    std::copy(src, src + weights.cols(), dst);
    dst[weights.cols()] = (*bias)[i];
  }
  return out;
}

// Right-multiplies the weight block by R, leaving a trailing bias column
// untouched (R is padded by a unit diagonal entry for it).
Matrix whiten_rows(const Matrix& rows, const Matrix& r, bool has_bias_col) {
  const std::size_t n = r.rows();
  Matrix out(rows.rows(), rows.cols());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const double* src = rows.row_ptr(i);
    double* dst = out.row_ptr(i);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += src[k] * r(k, j);
      dst[j] = s;
    }
    if (has_bias_col) dst[n] = src[n];
  }
  return out;
}

// Upstream second moments Sigma_A^0..Sigma_A^L on the probe: the raw input
// moment at index 0, hidden activation moments above.
std::vector<Matrix> activation_moments(const Architecture& arch, const MlpWeights& a,
                                       const Matrix& probe) {
  std::vector<Matrix> sigma;
  sigma.push_back(second_moment(probe));
  const ActivationTrace trace = forward(arch, a, probe);
  for (const Matrix& z : trace.hidden) sigma.push_back(second_moment(z));
  return sigma;
}

double sq_frobenius_diff(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return s;
}

}  // namespace

MlpWeights apply_stack(const Architecture& arch, const MlpWeights& weights,
                       const PermutationStack& stack) {
  check_stack(arch, stack);
  check_weights(arch, weights);
  MlpWeights out = weights;
  const std::size_t depth = arch.depth();
  for (std::size_t l = 0; l < depth; ++l) {
    out.layers[l] = permute_rows(out.layers[l], stack.layers[l]);
    if (out.has_bias()) {
      std::vector<double> b(out.biases[l].size());
      for (std::size_t i = 0; i < b.size(); ++i) b[i] = weights.biases[l][stack.layers[l][i]];
      out.biases[l] = std::move(b);
    }
    out.layers[l + 1] = permute_cols(out.layers[l + 1], stack.layers[l]);
  }
  return out;
}

PermutationStack match_layers(const Architecture& arch, const MlpWeights& a,
                              const MlpWeights& b, const MatchMethod& method) {
  arch.validate();
  check_weights(arch, a);
  check_weights(arch, b);
  const bool needs_probe = method.kind != MatchKind::naive_wm;
  if (needs_probe && method.probe.cols() == 0) {
    throw ConfigError("matching method requires a non-empty probe batch");
  }

  std::vector<Matrix> sigma;
  ActivationTrace trace_a, trace_b;
  if (method.kind == MatchKind::cov_wm) {
    sigma = activation_moments(arch, a, method.probe);
  } else if (method.kind == MatchKind::activation_m) {
    trace_a = forward(arch, a, method.probe);
    trace_b = forward(arch, b, method.probe);
  }

  PermutationStack stack;
  Permutation prev = Permutation::identity(arch.input_dim());
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    CostMatrix cost;
    if (method.kind == MatchKind::activation_m) {
      cost = pairwise_sq_dist(trace_a.hidden[l], trace_b.hidden[l]);
    } else {
      const std::vector<double>* bias_a = a.has_bias() ? &a.biases[l] : nullptr;
      const std::vector<double>* bias_b = b.has_bias() ? &b.biases[l] : nullptr;
      Matrix rows_a = rows_with_bias(a.layers[l], bias_a);
      Matrix rows_b = rows_with_bias(permute_cols(b.layers[l], prev), bias_b);
      if (method.kind == MatchKind::cov_wm) {
        const Matrix r = psd_sqrt(sigma[l]);
        rows_a = whiten_rows(rows_a, r, bias_a != nullptr);
        rows_b = whiten_rows(rows_b, r, bias_b != nullptr);
      }
      cost = pairwise_sq_dist(rows_a, rows_b);
    }
    stack.layers.push_back(solve_lap(cost).perm);
    prev = stack.layers.back();
  }
  return stack;
}

std::vector<LayerDims> dimension_table(const Architecture& arch, const MlpWeights& a,
                                       const Matrix& probe) {
  arch.validate();
  check_weights(arch, a);
  if (probe.cols() == 0) throw ArgumentError("dimension_table: empty probe");
  const std::vector<Matrix> sigma = activation_moments(arch, a, probe);

  std::vector<LayerDims> table;
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    const std::vector<double>* bias_a = a.has_bias() ? &a.biases[l] : nullptr;
    const Matrix rows_a = rows_with_bias(a.layers[l], bias_a);
    const Matrix white_a = whiten_rows(rows_a, psd_sqrt(sigma[l]), bias_a != nullptr);
    LayerDims dims;
    dims.layer = l + 1;
    dims.dim_w = approx_dim(multiply_abt(rows_a, rows_a));
    dims.dim_w_sigma = approx_dim(multiply_abt(white_a, white_a));
    dims.dim_sigma = approx_dim(sigma[l + 1]);
    table.push_back(dims);
  }
  return table;
}

std::vector<LayerMatchReport> matching_report(const Architecture& arch,
                                              const MlpWeights& a, const MlpWeights& b,
                                              const PermutationStack& stack,
                                              const Matrix& probe) {
  check_stack(arch, stack);
  check_weights(arch, a);
  check_weights(arch, b);
  if (probe.cols() == 0) throw ArgumentError("matching_report: empty probe");

  const std::vector<Matrix> sigma = activation_moments(arch, a, probe);
  const ActivationTrace trace_a = forward(arch, a, probe);
  const ActivationTrace trace_b = forward(arch, b, probe);

  std::vector<LayerMatchReport> report;
  Permutation prev = Permutation::identity(arch.input_dim());
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    const Permutation& pi = stack.layers[l];
    LayerMatchReport entry;
    entry.layer = l + 1;

    const std::vector<double>* bias_a = a.has_bias() ? &a.biases[l] : nullptr;
    const std::vector<double>* bias_b = b.has_bias() ? &b.biases[l] : nullptr;
    const Matrix rows_a = rows_with_bias(a.layers[l], bias_a);
    const Matrix rows_b =
        permute_rows(rows_with_bias(permute_cols(b.layers[l], prev), bias_b), pi);
    entry.cost_naive = sq_frobenius_diff(rows_a, rows_b);

    const Matrix r = psd_sqrt(sigma[l]);
    const Matrix white_a = whiten_rows(rows_a, r, bias_a != nullptr);
    const Matrix white_b = whiten_rows(rows_b, r, bias_b != nullptr);
    entry.cost_sigma = sq_frobenius_diff(white_a, white_b);

    entry.cost_activation =
        sq_frobenius_diff(trace_a.hidden[l], permute_rows(trace_b.hidden[l], pi));

    entry.dim_w = approx_dim(multiply_abt(rows_a, rows_a));
    entry.dim_w_sigma = approx_dim(multiply_abt(white_a, white_a));
    entry.dim_sigma = approx_dim(sigma[l + 1]);

    report.push_back(entry);
    prev = pi;
  }
  return report;
}

}  // namespace permalign
