#include "permalign/meanfield.hpp"

#include <cmath>
#include <limits>

#include "permalign/assignment.hpp"
#include "permalign/errors.hpp"

namespace permalign {

double ParticleNet::output(const double* x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < width(); ++i) {
    const double* wi = w.row_ptr(i);
    double pre = 0.0;
    for (std::size_t k = 0; k < w.cols(); ++k) pre += wi[k] * x[k];
    s += a[i] * apply_activation(activation, pre);
  }
  return s / static_cast<double>(width());
}

bool ParticleNet::all_finite() const {
  if (!w.all_finite()) return false;
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::size_t MeanFieldConfig::steps() const {
  return static_cast<std::size_t>(std::llround(total_time / step_size));
}

void MeanFieldConfig::validate() const {
  if (input_dim == 0 || width == 0) throw ConfigError("mean field: zero dimension");
  if (!(step_size > 0.0) || !(total_time > 0.0)) {
    throw ConfigError("mean field: step size and time must be positive");
  }
  if (activation == Activation::relu) {
    throw ConfigError("mean field: activation must be bounded (tanh or sigmoid)");
  }
  if (weight_decay < 0.0 || noise_temperature < 0.0) {
    throw ConfigError("mean field: negative regularization");
  }
  if (eval_size == 0) throw ConfigError("mean field: empty eval set");
  if (grid_size < 3) throw ConfigError("mean field: grid needs at least 3 points");
}

ParticleNet init_particles(const MeanFieldConfig& cfg, RngState& rng) {
  ParticleNet net;
  net.activation = cfg.activation;
  net.w = Matrix(cfg.width, cfg.input_dim);
  net.a.resize(cfg.width);
  for (std::size_t i = 0; i < cfg.width; ++i) {
    double* wi = net.w.row_ptr(i);
    for (std::size_t k = 0; k < cfg.input_dim; ++k) wi[k] = rng.next_uniform(-1.0, 1.0);
    net.a[i] = rng.next_uniform(-1.0, 1.0);
  }
  return net;
}

double teacher_output(const double* x, std::size_t d) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += x[k];
  return std::tanh(scale * s);
}

Matrix sample_mean_field_inputs(std::size_t d, std::size_t count, RngState& rng) {
  Matrix x(d, count);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t r = 0; r < d; ++r) x(r, c) = rng.next_uniform(-1.0, 1.0);
  }
  return x;
}

ParticleNet train_particles(const MeanFieldConfig& cfg, ParticleNet net,
                            RngState data_rng, RngState noise_rng) {
  cfg.validate();
  const std::size_t d = cfg.input_dim;
  const std::size_t n = cfg.width;
  const std::size_t steps = cfg.steps();
  const double s = cfg.step_size;  // constant schedule
  const double keep = 1.0 - 2.0 * cfg.weight_decay * s;
  const double noise_scale =
      cfg.noise_temperature > 0.0
          ? std::sqrt(2.0 * s * cfg.noise_temperature / static_cast<double>(d + 1))
          : 0.0;

  std::vector<double> x(d), act(n);
  for (std::size_t step = 0; step < steps; ++step) {
    for (double& v : x) v = data_rng.next_uniform(-1.0, 1.0);
    const double y = teacher_output(x.data(), d);

    double fhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* wi = net.w.row_ptr(i);
      double pre = 0.0;
      for (std::size_t k = 0; k < d; ++k) pre += wi[k] * x[k];
      act[i] = apply_activation(cfg.activation, pre);
      fhat += net.a[i] * act[i];
    }
    fhat /= static_cast<double>(n);

    const double drive = 2.0 * s * (y - fhat);
    for (std::size_t i = 0; i < n; ++i) {
      double* wi = net.w.row_ptr(i);
      const double dact = activation_derivative(cfg.activation, act[i]);
      const double wfactor = drive * net.a[i] * dact;
      for (std::size_t k = 0; k < d; ++k) {
        wi[k] = keep * wi[k] + wfactor * x[k];
        if (noise_scale > 0.0) wi[k] += noise_scale * noise_rng.next_gaussian();
      }
      net.a[i] = keep * net.a[i] + drive * act[i];
      if (noise_scale > 0.0) net.a[i] += noise_scale * noise_rng.next_gaussian();
    }
    if (!net.all_finite()) {
      throw DivergenceError("mean-field training diverged at step " + std::to_string(step));
    }
  }
  return net;
}

namespace {

Matrix particle_rows(const ParticleNet& net) {
  Matrix rows(net.width(), net.w.cols() + 1);
  for (std::size_t i = 0; i < net.width(); ++i) {
    std::copy_n(net.w.row_ptr(i), net.w.cols(), rows.row_ptr(i));
    rows(i, net.w.cols()) = net.a[i];
  }
  return rows;
}

ParticleNet permute_particles(const ParticleNet& net, const Permutation& pi) {
  ParticleNet out;
  out.activation = net.activation;
  out.w = Matrix(net.w.rows(), net.w.cols());
  out.a.resize(net.width());
  for (std::size_t i = 0; i < net.width(); ++i) {
    std::copy_n(net.w.row_ptr(pi[i]), net.w.cols(), out.w.row_ptr(i));
    out.a[i] = net.a[pi[i]];
  }
  return out;
}

ParticleNet interpolate_particles(const ParticleNet& a, const ParticleNet& b, double t) {
  ParticleNet out;
  out.activation = a.activation;
  out.w = convex_combination(a.w, b.w, t);
  out.a.resize(a.a.size());
  for (std::size_t i = 0; i < out.a.size(); ++i) {
    out.a[i] = t * a.a[i] + (1.0 - t) * b.a[i];
  }
  return out;
}

struct PathStats {
  double deviation = 0.0;
  double barrier = 0.0;
};

PathStats path_stats(const MeanFieldConfig& cfg, const ParticleNet& net_a,
                     const ParticleNet& net_b, const Matrix& eval_x,
                     const std::vector<double>& eval_y, double loss_a, double loss_b) {
  const std::size_t count = eval_x.cols();
  std::vector<double> fa(count), fb(count), xcol(cfg.input_dim);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t r = 0; r < cfg.input_dim; ++r) xcol[r] = eval_x(r, c);
    fa[c] = net_a.output(xcol.data());
    fb[c] = net_b.output(xcol.data());
  }

  PathStats stats;
  stats.barrier = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < cfg.grid_size; ++g) {
    const double t = static_cast<double>(g) / static_cast<double>(cfg.grid_size - 1);
    const ParticleNet mid = interpolate_particles(net_a, net_b, t);
    double loss_mid = 0.0;
    for (std::size_t c = 0; c < count; ++c) {
      for (std::size_t r = 0; r < cfg.input_dim; ++r) xcol[r] = eval_x(r, c);
      const double fm = mid.output(xcol.data());
      stats.deviation =
          std::max(stats.deviation, std::fabs(t * fa[c] + (1.0 - t) * fb[c] - fm));
      const double err = fm - eval_y[c];
      loss_mid += err * err;
    }
    loss_mid /= static_cast<double>(count);
    // Interior gap only; the endpoints match the baseline by construction.
    if (g > 0 && g + 1 < cfg.grid_size) {
      const double baseline = t * loss_a + (1.0 - t) * loss_b;
      stats.barrier = std::max(stats.barrier, loss_mid - baseline);
    }
  }
  return stats;
}

}  // namespace

MeanFieldReport meanfield_lmc(const MeanFieldConfig& cfg, RngState rng) {
  cfg.validate();

  RngState init_a = rng.child(0);
  RngState init_b = cfg.shared_init ? rng.child(0) : rng.child(1);
  ParticleNet net_a = init_particles(cfg, init_a);
  ParticleNet net_b = init_particles(cfg, init_b);

  net_a = train_particles(cfg, std::move(net_a), rng.child(2), rng.child(4));
  net_b = train_particles(cfg, std::move(net_b), rng.child(3), rng.child(5));

  RngState eval_rng = rng.child(6);
  const Matrix eval_x = sample_mean_field_inputs(cfg.input_dim, cfg.eval_size, eval_rng);
  std::vector<double> eval_y(cfg.eval_size), xcol(cfg.input_dim);
  for (std::size_t c = 0; c < cfg.eval_size; ++c) {
    for (std::size_t r = 0; r < cfg.input_dim; ++r) xcol[r] = eval_x(r, c);
    eval_y[c] = teacher_output(xcol.data(), cfg.input_dim);
  }

  auto eval_loss = [&](const ParticleNet& net) {
    double s = 0.0;
    for (std::size_t c = 0; c < cfg.eval_size; ++c) {
      for (std::size_t r = 0; r < cfg.input_dim; ++r) xcol[r] = eval_x(r, c);
      const double err = net.output(xcol.data()) - eval_y[c];
      s += err * err;
    }
    return s / static_cast<double>(cfg.eval_size);
  };

  MeanFieldReport report;
  report.width = cfg.width;
  report.input_dim = cfg.input_dim;
  report.steps = cfg.steps();
  report.total_time = cfg.total_time;
  report.step_size = cfg.step_size;
  report.weight_decay = cfg.weight_decay;
  report.noise_temperature = cfg.noise_temperature;
  report.loss_a = eval_loss(net_a);
  report.loss_b = eval_loss(net_b);

  const CostMatrix pair_cost = pairwise_sq_dist(particle_rows(net_a), particle_rows(net_b));
  const LapResult matched = solve_lap(pair_cost);
  report.w2sq_matched = matched.cost / static_cast<double>(cfg.width);
  double identity_cost = 0.0;
  for (std::size_t i = 0; i < cfg.width; ++i) identity_cost += pair_cost(i, i);
  report.w2sq_identity = identity_cost / static_cast<double>(cfg.width);

  const ParticleNet net_b_matched = permute_particles(net_b, matched.perm);
  const PathStats stats_matched = path_stats(cfg, net_a, net_b_matched, eval_x, eval_y,
                                             report.loss_a, report.loss_b);
  const PathStats stats_identity =
      path_stats(cfg, net_a, net_b, eval_x, eval_y, report.loss_a, report.loss_b);

  report.deviation_matched = stats_matched.deviation;
  report.deviation_identity = stats_identity.deviation;
  report.barrier_matched = stats_matched.barrier;
  report.barrier_identity = stats_identity.barrier;
  return report;
}

}  // namespace permalign
