#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "permalign/matrix.hpp"
#include "permalign/rng.hpp"
#include "permalign/sampling.hpp"

namespace permalign {

enum class Activation { relu, sigmoid, tanh };
enum class LossKind { mse, cross_entropy };
enum class StepSchedule { constant };

std::string to_string(Activation a);
std::string to_string(LossKind k);
Activation activation_from_string(const std::string& name);
LossKind loss_from_string(const std::string& name);

/// Layer widths m_0, ..., m_{L+1} plus the shared nonlinearity. Hidden
/// layers apply the activation; the output layer is linear.
struct Architecture {
  std::vector<std::size_t> dims;
  Activation activation = Activation::relu;
  bool use_bias = false;

  /// Number of hidden layers L.
  std::size_t depth() const { return dims.size() - 2; }
  std::size_t num_weight_layers() const { return dims.size() - 1; }
  std::size_t input_dim() const { return dims.front(); }
  std::size_t output_dim() const { return dims.back(); }

  void validate() const;
  bool operator==(const Architecture& other) const = default;
};

/// Weight matrices W^1..W^{L+1} (layer l: m_l x m_{l-1}) and, when biases
/// are enabled, one bias vector per layer.
struct MlpWeights {
  std::vector<Matrix> layers;
  std::vector<std::vector<double>> biases;

  bool has_bias() const { return !biases.empty(); }
  std::size_t parameter_count() const;
  bool all_finite() const;

  bool operator==(const MlpWeights& other) const = default;
};

/// Hidden activations phi^1..phi^L and the linear outputs, one column per
/// input sample.
struct ActivationTrace {
  std::vector<Matrix> hidden;
  Matrix output;
};

/// Inputs as columns, with per-sample regression targets and/or class labels.
struct Dataset {
  Matrix inputs;
  Matrix targets;           // output_dim x count; may be empty for pure classification
  std::vector<int> labels;  // may be empty for pure regression

  std::size_t count() const { return inputs.cols(); }
  void validate() const;
};

/// Contiguous copy of selected dataset columns.
struct Batch {
  Matrix x;
  Matrix y;
  std::vector<int> labels;
};

Batch gather_batch(const Dataset& data, const std::vector<std::size_t>& indices);
Batch full_batch(const Dataset& data);

struct TrainConfig {
  std::size_t steps = 0;
  std::size_t batch_size = 1;
  double step_size = 0.0;
  StepSchedule schedule = StepSchedule::constant;
  double weight_decay = 0.0;
  double noise_temperature = 0.0;
  LossKind loss = LossKind::mse;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class InitScheme { gaussian_iid, block_cov, uniform };

struct InitSpec {
  InitScheme scheme = InitScheme::gaussian_iid;
  std::vector<CovarianceSpec> layer_specs;  // block_cov: one per weight layer
  double half_width = 1.0;                  // uniform

  static InitSpec gaussian_iid();
  static InitSpec uniform(double half_width);
  static InitSpec block_cov(std::vector<CovarianceSpec> specs);
};

/// Rows of each W^l drawn i.i.d. from the chosen law; biases start at zero.
/// gaussian_iid uses N(0, I/m_{l-1}) per row.
MlpWeights init_weights(const Architecture& arch, const InitSpec& spec, RngState& rng);

ActivationTrace forward(const Architecture& arch, const MlpWeights& weights,
                        const Matrix& inputs);

/// Mean loss over the batch columns. mse sums squared error over output
/// coordinates; cross_entropy is the negative log-softmax of the true class.
double loss_value(const Matrix& outputs, const Batch& batch, LossKind kind);

struct LossAndGrad {
  double loss = 0.0;
  MlpWeights grads;
};

/// Backpropagated gradients of the batch-mean loss in every weight (and
/// bias, when present).
LossAndGrad loss_and_grad(const Architecture& arch, const MlpWeights& weights,
                          const Batch& batch, LossKind kind);

struct TrainResult {
  MlpWeights weights;
  std::vector<double> loss_log;  // one batch loss per step, pre-update
};

/// Minibatch SGD with decoupled weight decay and optional Gaussian
/// parameter noise:
///   theta <- (1 - 2*lambda*s_k)*theta - s_k*grad + sqrt(2*s_k*tau/d)*g,
/// d the total parameter count. Minibatches are sampled i.i.d. with
/// replacement. Deterministic given rng; a non-finite parameter aborts
/// with DivergenceError naming the step.
TrainResult train(const Architecture& arch, MlpWeights weights, const Dataset& data,
                  const TrainConfig& cfg, RngState rng);

// Pointwise activation helpers shared with the experiment drivers.
double apply_activation(Activation a, double v);
/// Derivative expressed through the activated value sigma(z).
double activation_derivative(Activation a, double activated);

}  // namespace permalign
