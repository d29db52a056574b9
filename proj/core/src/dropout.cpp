#include "permalign/dropout.hpp"

#include <cmath>

#include "permalign/assignment.hpp"
#include "permalign/errors.hpp"

namespace permalign {

DropoutGap dropout_gap(const Architecture& arch, const MlpWeights& weights,
                       const Matrix& eval_inputs) {
  arch.validate();
  if (arch.depth() != 1 || arch.output_dim() != 1) {
    throw ArgumentError("dropout_gap: expects one hidden layer and scalar output");
  }
  if (arch.activation == Activation::sigmoid) {
    throw ArgumentError("dropout_gap: activation must be 1-Lipschitz with s(0)=0");
  }
  const std::size_t width = arch.dims[1];
  if (width % 2 != 0) throw ArgumentError("dropout_gap: hidden width must be even");
  if (eval_inputs.cols() == 0) throw ArgumentError("dropout_gap: empty eval set");
  if (eval_inputs.rows() != arch.input_dim()) {
    throw ArgumentError("dropout_gap: eval inputs do not match input dim");
  }

  const double inv_n = 1.0 / static_cast<double>(width);
  for (std::size_t j = 0; j < width; ++j) {
    if (std::fabs(weights.layers[1](0, j) - inv_n) > 1e-12) {
      throw ArgumentError("dropout_gap: output layer must be uniform 1/N");
    }
  }

  const Matrix& w = weights.layers[0];
  const std::size_t half = width / 2;
  double total = 0.0;
  for (std::size_t c = 0; c < eval_inputs.cols(); ++c) {
    double sum_first = 0.0, sum_all = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      double pre = 0.0;
      const double* row = w.row_ptr(i);
      for (std::size_t k = 0; k < w.cols(); ++k) pre += row[k] * eval_inputs(k, c);
      const double act = apply_activation(arch.activation, pre);
      sum_all += act;
      if (i < half) sum_first += act;
    }
    total += std::fabs(2.0 * inv_n * sum_first - inv_n * sum_all);
  }

  Matrix first(half, w.cols()), second(half, w.cols());
  for (std::size_t i = 0; i < half; ++i) {
    std::copy_n(w.row_ptr(i), w.cols(), first.row_ptr(i));
    std::copy_n(w.row_ptr(half + i), w.cols(), second.row_ptr(i));
  }

  DropoutGap gap;
  gap.drop_error = total / static_cast<double>(eval_inputs.cols());
  gap.w1_bound = wasserstein(first, second, 1);
  return gap;
}

}  // namespace permalign
