#include "permalign/network.hpp"

#include <cmath>

#include "permalign/errors.hpp"

namespace permalign {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  throw ArgumentError("unknown activation");
}

std::string to_string(LossKind k) {
  return k == LossKind::mse ? "mse" : "cross_entropy";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + name + "'");
}

LossKind loss_from_string(const std::string& name) {
  if (name == "mse") return LossKind::mse;
  if (name == "cross_entropy") return LossKind::cross_entropy;
  throw ConfigError("unknown loss '" + name + "'");
}

void Architecture::validate() const {
  if (dims.size() < 2) throw ConfigError("architecture needs input and output dims");
  for (std::size_t d : dims) {
    if (d == 0) throw ConfigError("architecture has a zero-width layer");
  }
}

std::size_t MlpWeights::parameter_count() const {
  std::size_t n = 0;
  for (const Matrix& w : layers) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

bool MlpWeights::all_finite() const {
  for (const Matrix& w : layers) {
    if (!w.all_finite()) return false;
  }
  for (const auto& b : biases) {
    for (double v : b) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void Dataset::validate() const {
  if (count() == 0) throw ArgumentError("dataset is empty");
  if (targets.size() > 0 && targets.cols() != count()) {
    throw ConsistencyError("dataset targets do not match input count");
  }
  if (!labels.empty() && labels.size() != count()) {
    throw ConsistencyError("dataset labels do not match input count");
  }
}

Batch gather_batch(const Dataset& data, const std::vector<std::size_t>& indices) {
  Batch b;
  b.x = Matrix(data.inputs.rows(), indices.size());
  for (std::size_t c = 0; c < indices.size(); ++c) {
    for (std::size_t r = 0; r < data.inputs.rows(); ++r) {
      b.x(r, c) = data.inputs(r, indices[c]);
    }
  }
  if (data.targets.size() > 0) {
    b.y = Matrix(data.targets.rows(), indices.size());
    for (std::size_t c = 0; c < indices.size(); ++c) {
      for (std::size_t r = 0; r < data.targets.rows(); ++r) {
        b.y(r, c) = data.targets(r, indices[c]);
      }
    }
  }
  if (!data.labels.empty()) {
    b.labels.reserve(indices.size());
    for (std::size_t idx : indices) b.labels.push_back(data.labels[idx]);
  }
  return b;
}

Batch full_batch(const Dataset& data) {
  Batch b;
  b.x = data.inputs;
  b.y = data.targets;
  b.labels = data.labels;
  return b;
}

void TrainConfig::validate() const {
  if (!(step_size > 0.0)) throw ConfigError("train: step size must be positive");
  if (batch_size < 1) throw ConfigError("train: batch size must be at least 1");
  if (weight_decay < 0.0) throw ConfigError("train: weight decay must be >= 0");
  if (noise_temperature < 0.0) throw ConfigError("train: noise temperature must be >= 0");
}

InitSpec InitSpec::gaussian_iid() { return InitSpec{}; }

InitSpec InitSpec::uniform(double half_width) {
  InitSpec s;
  s.scheme = InitScheme::uniform;
  s.half_width = half_width;
  return s;
}

InitSpec InitSpec::block_cov(std::vector<CovarianceSpec> specs) {
  InitSpec s;
  s.scheme = InitScheme::block_cov;
  s.layer_specs = std::move(specs);
  return s;
}

MlpWeights init_weights(const Architecture& arch, const InitSpec& spec, RngState& rng) {
  arch.validate();
  if (spec.scheme == InitScheme::block_cov &&
      spec.layer_specs.size() != arch.num_weight_layers()) {
    throw ConfigError("init_weights: one covariance spec per weight layer required");
  }

  MlpWeights w;
  for (std::size_t l = 0; l < arch.num_weight_layers(); ++l) {
    const std::size_t fan_in = arch.dims[l];
    const std::size_t fan_out = arch.dims[l + 1];
    switch (spec.scheme) {
      case InitScheme::gaussian_iid: {
        const CovarianceSpec law =
            CovarianceSpec::isotropic(fan_in, 1.0 / static_cast<double>(fan_in));
        w.layers.push_back(gaussian_rows(fan_out, law, rng));
        break;
      }
      case InitScheme::block_cov: {
        const CovarianceSpec& law = spec.layer_specs[l];
        if (law.dimension() != fan_in) {
          throw ConfigError("init_weights: covariance dimension does not match fan-in");
        }
        w.layers.push_back(gaussian_rows(fan_out, law, rng));
        break;
      }
      case InitScheme::uniform:
        w.layers.push_back(uniform_rows(fan_out, fan_in, spec.half_width, rng));
        break;
    }
  }
  if (arch.use_bias) {
    for (std::size_t l = 0; l < arch.num_weight_layers(); ++l) {
      w.biases.emplace_back(arch.dims[l + 1], 0.0);
    }
  }
  return w;
}

double apply_activation(Activation a, double v) {
  switch (a) {
    case Activation::relu: return v > 0.0 ? v : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-v));
    case Activation::tanh: return std::tanh(v);
  }
  throw ArgumentError("unknown activation");
}

double activation_derivative(Activation a, double activated) {
  switch (a) {
    case Activation::relu: return activated > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return activated * (1.0 - activated);
    case Activation::tanh: return 1.0 - activated * activated;
  }
  throw ArgumentError("unknown activation");
}

namespace {

void check_weight_shapes(const Architecture& arch, const MlpWeights& w) {
  if (w.layers.size() != arch.num_weight_layers()) {
    throw ArgumentError("weights do not match architecture depth");
  }
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    if (w.layers[l].rows() != arch.dims[l + 1] || w.layers[l].cols() != arch.dims[l]) {
      throw ArgumentError("weight matrix shape does not match architecture");
    }
  }
  if (arch.use_bias) {
    if (w.biases.size() != arch.num_weight_layers()) {
      throw ArgumentError("bias vectors do not match architecture depth");
    }
    for (std::size_t l = 0; l < w.biases.size(); ++l) {
      if (w.biases[l].size() != arch.dims[l + 1]) {
        throw ArgumentError("bias length does not match layer width");
      }
    }
  }
}

void add_bias_columns(Matrix& pre, const std::vector<double>& bias) {
  for (std::size_t i = 0; i < pre.rows(); ++i) {
    double* row = pre.row_ptr(i);
    const double b = bias[i];
    for (std::size_t j = 0; j < pre.cols(); ++j) row[j] += b;
  }
}

}  // namespace

ActivationTrace forward(const Architecture& arch, const MlpWeights& weights,
                        const Matrix& inputs) {
  check_weight_shapes(arch, weights);
  if (inputs.rows() != arch.input_dim()) {
    throw ArgumentError("forward: input rows do not match m_0");
  }

  ActivationTrace trace;
  const Matrix* current = &inputs;
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    Matrix pre = multiply(weights.layers[l], *current);
    if (arch.use_bias) add_bias_columns(pre, weights.biases[l]);
    for (double& v : pre.data()) v = apply_activation(arch.activation, v);
    trace.hidden.push_back(std::move(pre));
    current = &trace.hidden.back();
  }
  trace.output = multiply(weights.layers.back(), *current);
  if (arch.use_bias) add_bias_columns(trace.output, weights.biases.back());
  return trace;
}

namespace {

double softmax_loss_and_grad(const Matrix& outputs, const std::vector<int>& labels,
                             Matrix* dout) {
  const std::size_t classes = outputs.rows();
  const std::size_t batch = outputs.cols();
  if (labels.size() != batch) {
    throw ArgumentError("cross_entropy: label count does not match batch");
  }
  const double inv_b = 1.0 / static_cast<double>(batch);
  double loss = 0.0;
  if (dout) *dout = Matrix(classes, batch);
  std::vector<double> prob(classes);
  for (std::size_t c = 0; c < batch; ++c) {
    const int label = labels[c];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw ArgumentError("cross_entropy: class index out of range");
    }
    double maxv = outputs(0, c);
    for (std::size_t r = 1; r < classes; ++r) maxv = std::max(maxv, outputs(r, c));
    double sum = 0.0;
    for (std::size_t r = 0; r < classes; ++r) {
      prob[r] = std::exp(outputs(r, c) - maxv);
      sum += prob[r];
    }
    loss += std::log(sum) - (outputs(static_cast<std::size_t>(label), c) - maxv);
    if (dout) {
      for (std::size_t r = 0; r < classes; ++r) {
        (*dout)(r, c) = (prob[r] / sum) * inv_b;
      }
      (*dout)(static_cast<std::size_t>(label), c) -= inv_b;
    }
  }
  return loss * inv_b;
}

double mse_loss_and_grad(const Matrix& outputs, const Matrix& targets, Matrix* dout) {
  if (!outputs.same_shape(targets)) {
    throw ArgumentError("mse: output and target shapes differ");
  }
  const double inv_b = 1.0 / static_cast<double>(outputs.cols());
  double loss = 0.0;
  if (dout) *dout = Matrix(outputs.rows(), outputs.cols());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const double diff = outputs.data()[i] - targets.data()[i];
    loss += diff * diff;
    if (dout) dout->data()[i] = 2.0 * diff * inv_b;
  }
  return loss * inv_b;
}

}  // namespace

double loss_value(const Matrix& outputs, const Batch& batch, LossKind kind) {
  if (kind == LossKind::mse) return mse_loss_and_grad(outputs, batch.y, nullptr);
  return softmax_loss_and_grad(outputs, batch.labels, nullptr);
}

LossAndGrad loss_and_grad(const Architecture& arch, const MlpWeights& weights,
                          const Batch& batch, LossKind kind) {
  const ActivationTrace trace = forward(arch, weights, batch.x);

  LossAndGrad out;
  Matrix delta;
  if (kind == LossKind::mse) {
    out.loss = mse_loss_and_grad(trace.output, batch.y, &delta);
  } else {
    out.loss = softmax_loss_and_grad(trace.output, batch.labels, &delta);
  }

  const std::size_t last = arch.num_weight_layers() - 1;
  out.grads.layers.resize(arch.num_weight_layers());
  if (arch.use_bias) out.grads.biases.resize(arch.num_weight_layers());

  for (std::size_t l = last + 1; l-- > 0;) {
    const Matrix& below = l == 0 ? batch.x : trace.hidden[l - 1];
    out.grads.layers[l] = multiply_abt(delta, below);
    if (arch.use_bias) {
      std::vector<double> bg(delta.rows(), 0.0);
      for (std::size_t r = 0; r < delta.rows(); ++r) {
        const double* row = delta.row_ptr(r);
        for (std::size_t c = 0; c < delta.cols(); ++c) bg[r] += row[c];
      }
      out.grads.biases[l] = std::move(bg);
    }
    if (l > 0) {
      Matrix next = multiply_atb(weights.layers[l], delta);
      const Matrix& act = trace.hidden[l - 1];
      for (std::size_t i = 0; i < next.size(); ++i) {
        next.data()[i] *= activation_derivative(arch.activation, act.data()[i]);
      }
      delta = std::move(next);
    }
  }
  return out;
}

TrainResult train(const Architecture& arch, MlpWeights weights, const Dataset& data,
                  const TrainConfig& cfg, RngState rng) {
  cfg.validate();
  data.validate();
  check_weight_shapes(arch, weights);

  const std::size_t d_total = weights.parameter_count();
  TrainResult result;
  result.loss_log.reserve(cfg.steps);

  std::vector<std::size_t> indices(cfg.batch_size);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const double s = cfg.step_size;  // constant schedule
    for (std::size_t& idx : indices) idx = rng.next_u64() % data.count();
    const Batch batch = gather_batch(data, indices);
    LossAndGrad lg = loss_and_grad(arch, weights, batch, cfg.loss);
    result.loss_log.push_back(lg.loss);

    const double keep = 1.0 - 2.0 * cfg.weight_decay * s;
    const double noise_scale =
        cfg.noise_temperature > 0.0
            ? std::sqrt(2.0 * s * cfg.noise_temperature / static_cast<double>(d_total))
            : 0.0;

    for (std::size_t l = 0; l < weights.layers.size(); ++l) {
      auto& w = weights.layers[l].data();
      const auto& g = lg.grads.layers[l].data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = keep * w[i] - s * g[i];
        if (noise_scale > 0.0) w[i] += noise_scale * rng.next_gaussian();
      }
    }
    for (std::size_t l = 0; l < weights.biases.size(); ++l) {
      auto& b = weights.biases[l];
      const auto& g = lg.grads.biases[l];
      for (std::size_t i = 0; i < b.size(); ++i) {
        b[i] = keep * b[i] - s * g[i];
        if (noise_scale > 0.0) b[i] += noise_scale * rng.next_gaussian();
      }
    }
    if (!weights.all_finite()) {
      throw DivergenceError("training diverged: non-finite parameter after step " +
                            std::to_string(step));
    }
  }
  result.weights = std::move(weights);
  return result;
}

}  // namespace permalign
