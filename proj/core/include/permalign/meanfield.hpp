#pragma once

#include <cstddef>

#include "permalign/matrix.hpp"
#include "permalign/network.hpp"
#include "permalign/rng.hpp"

namespace permalign {

/// Wide two-layer averaging network f(x) = (1/N) sum_i a_i s(w_i . x),
/// stored particle-wise: one (w_i, a_i) pair per hidden unit.
struct ParticleNet {
  Matrix w;               // N x d
  std::vector<double> a;  // N
  Activation activation = Activation::tanh;

  std::size_t width() const { return a.size(); }
  double output(const double* x) const;
  bool all_finite() const;
};

struct MeanFieldConfig {
  std::size_t input_dim = 4;
  std::size_t width = 256;
  double total_time = 2.0;
  double step_size = 0.02;
  double weight_decay = 0.0;
  double noise_temperature = 0.0;
  Activation activation = Activation::tanh;  // bounded Lipschitz: tanh or sigmoid
  std::size_t eval_size = 512;
  std::size_t grid_size = 25;
  /// When true, both networks share the initial parameter draw; they always
  /// share only the initial distribution otherwise.
  bool shared_init = false;

  std::size_t steps() const;
  void validate() const;
};

/// Particles drawn i.i.d. from the bounded base law: every coordinate of
/// (w_i, a_i) uniform on [-1, 1].
ParticleNet init_particles(const MeanFieldConfig& cfg, RngState& rng);

/// Bounded synthetic regression target y = tanh(<w*, x>) with w* = 1/sqrt(d)
/// in every coordinate; inputs are uniform on [-1, 1]^d.
double teacher_output(const double* x, std::size_t d);
Matrix sample_mean_field_inputs(std::size_t d, std::size_t count, RngState& rng);

/// One-sample-per-step particle SGD:
///   theta_i <- (1 - 2*lambda*s_k)*theta_i
///              + 2*s_k*(y_k - f(x_k)) * grad_theta_i [a_i s(w_i x_k)]
///              + sqrt(2*s_k*tau/(d+1)) * g_i,
/// run for steps() = total_time / step_size steps.
ParticleNet train_particles(const MeanFieldConfig& cfg, ParticleNet net,
                            RngState data_rng, RngState noise_rng);

struct MeanFieldReport {
  std::size_t width = 0;
  std::size_t input_dim = 0;
  std::size_t steps = 0;
  double total_time = 0.0;
  double step_size = 0.0;
  double weight_decay = 0.0;
  double noise_temperature = 0.0;
  double loss_a = 0.0;
  double loss_b = 0.0;
  /// sup over the t grid and the eval set of
  /// |t f_A(x) + (1-t) f_B(x) - f_{M_t}(x)|.
  double deviation_matched = 0.0;
  double deviation_identity = 0.0;
  double barrier_matched = 0.0;
  double barrier_identity = 0.0;
  /// Mean squared pairing cost between the (w_i, a_i) point clouds.
  double w2sq_matched = 0.0;
  double w2sq_identity = 0.0;
};

/// Trains two networks independently for the same underlying time, aligns
/// B's hidden units to A's by an exact assignment on concatenated (w, a)
/// rows, and measures output deviation and loss barriers along the linear
/// path, both matched and unmatched.
MeanFieldReport meanfield_lmc(const MeanFieldConfig& cfg, RngState rng);

}  // namespace permalign
