#include "permalign/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "permalign/checkpoint.hpp"
#include "permalign/config.hpp"
#include "permalign/csv.hpp"
#include "permalign/dropout.hpp"
#include "permalign/errors.hpp"
#include "permalign/interpolation.hpp"
#include "permalign/matching.hpp"
#include "permalign/meanfield.hpp"
#include "permalign/mnist.hpp"
#include "permalign/parallel.hpp"
#include "permalign/rates.hpp"
#include "permalign/synth.hpp"

namespace fs = std::filesystem;

namespace permalign {

namespace {

struct RunContext {
  ExperimentConfig config;
  fs::path out_dir;
  std::size_t threads = 1;

  std::uint64_t seed() const { return config.get_u64_or("seed", 0); }
  std::string out_path(const std::string& name) const { return (out_dir / name).string(); }
};

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  ExperimentConfig(doc).write_file(path);
}

void require_input_file(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("input path does not exist: '" + path + "'");
}

struct LoadedData {
  Dataset train;
  Dataset test;
};

// "data": {"kind":"mnist", train/test image+label paths} or
// {"kind":"synth", input_dim, classes, train_count, test_count, noise, seed}.
LoadedData load_data(const ExperimentConfig& parent) {
  if (!parent.has("data")) throw ConfigError("missing config key 'data'");
  ExperimentConfig data(parent.raw().at("data"));
  const std::string kind = data.get_string("kind");
  if (kind == "mnist") {
    data.require_keys_within(
        {"kind", "train_images", "train_labels", "test_images", "test_labels"});
    const std::string ti = data.get_string("train_images");
    const std::string tl = data.get_string("train_labels");
    const std::string vi = data.get_string("test_images");
    const std::string vl = data.get_string("test_labels");
    for (const std::string& p : {ti, tl, vi, vl}) require_input_file(p);
    LoadedData out;
    out.train = mnist_to_dataset(load_mnist_idx(ti, tl));
    out.test = mnist_to_dataset(load_mnist_idx(vi, vl));
    return out;
  }
  if (kind == "synth") {
    data.require_keys_within(
        {"kind", "input_dim", "classes", "train_count", "test_count", "noise", "seed"});
    SynthSpec spec;
    spec.input_dim = data.get_size_or("input_dim", 784);
    spec.classes = data.get_size_or("classes", 10);
    spec.train_count = data.get_size_or("train_count", 8192);
    spec.test_count = data.get_size_or("test_count", 2048);
    spec.noise = data.get_double_or("noise", 0.25);
    spec.seed = data.get_u64_or("seed", 7);
    const SynthData synth = make_synth_classification(spec);
    return LoadedData{synth.train, synth.test};
  }
  throw ConfigError("unknown data kind '" + kind + "'");
}

Matrix probe_from(const Dataset& test, std::size_t probe_size) {
  const std::size_t count = std::min(probe_size, test.count());
  if (count == 0) throw ConfigError("probe batch is empty");
  Matrix probe(test.inputs.rows(), count);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t r = 0; r < probe.rows(); ++r) probe(r, c) = test.inputs(r, c);
  }
  return probe;
}

Architecture arch_from(const ExperimentConfig& cfg) {
  Architecture arch;
  arch.dims = cfg.get_size_list("dims");
  arch.activation = activation_from_string(cfg.get_string_or("activation", "relu"));
  arch.use_bias = cfg.get_bool_or("use_bias", false);
  arch.validate();
  return arch;
}

InitSpec init_from(const ExperimentConfig& cfg) {
  if (!cfg.has("init")) return InitSpec::gaussian_iid();
  const nlohmann::json& v = cfg.raw().at("init");
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "gaussian_iid") return InitSpec::gaussian_iid();
    throw ConfigError("unknown init scheme '" + name + "'");
  }
  ExperimentConfig init(v);
  const std::string scheme = init.get_string("scheme");
  if (scheme == "gaussian_iid") return InitSpec::gaussian_iid();
  if (scheme == "uniform") {
    init.require_keys_within({"scheme", "half_width"});
    return InitSpec::uniform(init.get_double("half_width"));
  }
  if (scheme == "block_cov") {
    init.require_keys_within({"scheme", "layers"});
    std::vector<CovarianceSpec> specs;
    for (const auto& layer : v.at("layers")) {
      CovarianceSpec s;
      s.group_sizes = layer.at("group_sizes").get<std::vector<std::size_t>>();
      s.eigenvalues = layer.at("eigenvalues").get<std::vector<double>>();
      s.validate();
      specs.push_back(std::move(s));
    }
    return InitSpec::block_cov(std::move(specs));
  }
  throw ConfigError("unknown init scheme '" + scheme + "'");
}

PermutationStack stack_from_file(const std::string& path, const Architecture& arch) {
  require_input_file(path);
  const ExperimentConfig doc = ExperimentConfig::parse_file(path);
  if (!doc.has("layers")) throw FormatError("stack file is missing 'layers'");
  PermutationStack stack;
  for (const auto& layer : doc.raw().at("layers")) {
    Permutation p;
    p.mapping = layer.get<std::vector<std::size_t>>();
    p.validate();
    stack.layers.push_back(std::move(p));
  }
  if (stack.layers.size() != arch.depth()) {
    throw ConsistencyError("stack depth does not match checkpoint architecture");
  }
  return stack;
}

void write_stack(const std::string& path, const PermutationStack& stack) {
  nlohmann::json doc;
  doc["layers"] = nlohmann::json::array();
  for (const Permutation& p : stack.layers) doc["layers"].push_back(p.mapping);
  write_json_file(path, doc);
}

RateOptions rate_options_from(const RunContext& ctx) {
  RateOptions opts;
  opts.m_values = ctx.config.get_size_list("m_values");
  opts.trials = ctx.config.get_size("trials");
  opts.threads = ctx.threads;
  return opts;
}

void write_rate_csv(const std::string& path, const RateSweep& sweep) {
  CsvWriter csv({"m", "mean_cost", "std_err", "slope", "intercept", "r_squared"});
  for (const RatePoint& p : sweep.fit.points) {
    csv.cell(p.m).cell(p.mean_cost).cell(p.std_err);
    csv.cell(sweep.fit.slope).cell(sweep.fit.intercept).cell(sweep.fit.r_squared);
    csv.end_row();
  }
  csv.write_file(path);
}

// ---- commands ----

void cmd_train(const RunContext& ctx) {
  ctx.config.require_keys_within({"dims", "activation", "use_bias", "init", "steps",
                                  "epochs", "batch_size", "learning_rate", "weight_decay",
                                  "noise_temperature", "loss", "seed", "data", "output"});
  const Architecture arch = arch_from(ctx.config);
  const LoadedData data = load_data(ctx.config);

  TrainConfig train_cfg;
  train_cfg.batch_size = ctx.config.get_size_or("batch_size", 128);
  train_cfg.step_size = ctx.config.get_double("learning_rate");
  train_cfg.weight_decay = ctx.config.get_double_or("weight_decay", 0.0);
  train_cfg.noise_temperature = ctx.config.get_double_or("noise_temperature", 0.0);
  train_cfg.loss = loss_from_string(ctx.config.get_string_or("loss", "cross_entropy"));
  train_cfg.seed = ctx.seed();
  if (ctx.config.has("steps")) {
    train_cfg.steps = ctx.config.get_size("steps");
  } else {
    const std::size_t epochs = ctx.config.get_size_or("epochs", 1);
    const std::size_t per_epoch =
        (data.train.count() + train_cfg.batch_size - 1) / train_cfg.batch_size;
    train_cfg.steps = epochs * per_epoch;
  }

  RngState rng(train_cfg.seed);
  RngState init_rng = rng.child(0);
  MlpWeights weights = init_weights(arch, init_from(ctx.config), init_rng);
  const TrainResult result = train(arch, std::move(weights), data.train, train_cfg,
                                   rng.child(1));

  CsvWriter loss_csv({"step", "loss"});
  for (std::size_t step = 0; step < result.loss_log.size(); ++step) {
    loss_csv.cell(step).cell(result.loss_log[step]).end_row();
  }
  loss_csv.write_file(ctx.out_path("train_loss.csv"));

  std::map<std::string, std::string> metadata;
  metadata["command"] = "train";
  metadata["seed"] = std::to_string(train_cfg.seed);
  metadata["steps"] = std::to_string(train_cfg.steps);
  metadata["learning_rate"] = format_double(train_cfg.step_size);
  metadata["loss"] = to_string(train_cfg.loss);
  if (!result.loss_log.empty()) {
    metadata["final_loss"] = format_double(result.loss_log.back());
  }
  save_checkpoint(ctx.out_path(ctx.config.get_string_or("output", "model.ckpt")), arch,
                  result.weights, metadata);
}

void cmd_align(const RunContext& ctx) {
  ctx.config.require_keys_within(
      {"checkpoint_a", "checkpoint_b", "method", "probe_size", "data", "seed"});
  const std::string path_a = ctx.config.get_string("checkpoint_a");
  const std::string path_b = ctx.config.get_string("checkpoint_b");
  require_input_file(path_a);
  require_input_file(path_b);
  const Checkpoint a = load_checkpoint(path_a);
  const Checkpoint b = load_checkpoint(path_b);
  if (a.arch != b.arch) throw ConsistencyError("checkpoints have different architectures");

  const LoadedData data = load_data(ctx.config);
  const Matrix probe = probe_from(data.test, ctx.config.get_size_or("probe_size", 1024));

  const MatchKind kind = match_kind_from_string(ctx.config.get_string("method"));
  MatchMethod method;
  method.kind = kind;
  if (kind != MatchKind::naive_wm) method.probe = probe;

  const PermutationStack stack = match_layers(a.arch, a.weights, b.weights, method);
  write_stack(ctx.out_path("stack.json"), stack);

  CsvWriter csv({"layer", "cost_naive", "cost_sigma", "cost_activation", "dim_w",
                 "dim_w_sigma", "dim_sigma"});
  for (const LayerMatchReport& row :
       matching_report(a.arch, a.weights, b.weights, stack, probe)) {
    csv.cell(row.layer).cell(row.cost_naive).cell(row.cost_sigma).cell(row.cost_activation);
    csv.cell(row.dim_w).cell(row.dim_w_sigma).cell(row.dim_sigma);
    csv.end_row();
  }
  csv.write_file(ctx.out_path("report.csv"));
}

struct CheckpointPair {
  Checkpoint a;
  Checkpoint b;
};

CheckpointPair load_pair_with_stack(const RunContext& ctx) {
  const std::string path_a = ctx.config.get_string("checkpoint_a");
  const std::string path_b = ctx.config.get_string("checkpoint_b");
  require_input_file(path_a);
  require_input_file(path_b);
  CheckpointPair pair{load_checkpoint(path_a), load_checkpoint(path_b)};
  if (pair.a.arch != pair.b.arch) {
    throw ConsistencyError("checkpoints have different architectures");
  }
  if (ctx.config.has("stack")) {
    const PermutationStack stack =
        stack_from_file(ctx.config.get_string("stack"), pair.b.arch);
    pair.b.weights = apply_stack(pair.b.arch, pair.b.weights, stack);
  }
  return pair;
}

void cmd_barrier(const RunContext& ctx) {
  ctx.config.require_keys_within(
      {"checkpoint_a", "checkpoint_b", "stack", "data", "loss", "grid_size", "seed"});
  const CheckpointPair pair = load_pair_with_stack(ctx);
  const LoadedData data = load_data(ctx.config);
  const LossKind loss = loss_from_string(ctx.config.get_string_or("loss", "cross_entropy"));
  const std::size_t grid = ctx.config.get_size_or("grid_size", 25);

  const BarrierCurve curve =
      barrier_curve(pair.a.arch, pair.a.weights, pair.b.weights, data.test, loss, grid);
  CsvWriter csv({"t", "loss", "baseline", "loss_a", "loss_b", "barrier_raw",
                 "barrier_clamped"});
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    const double t = curve.t_grid[i];
    csv.cell(t).cell(curve.losses[i]);
    csv.cell(t * curve.loss_a + (1.0 - t) * curve.loss_b);
    csv.cell(curve.loss_a).cell(curve.loss_b);
    csv.cell(curve.barrier_raw).cell(curve.barrier_clamped);
    csv.end_row();
  }
  csv.write_file(ctx.out_path("barrier.csv"));
}

void cmd_deviations(const RunContext& ctx) {
  ctx.config.require_keys_within(
      {"checkpoint_a", "checkpoint_b", "stack", "data", "grid_size", "eval_size", "seed"});
  const CheckpointPair pair = load_pair_with_stack(ctx);
  const LoadedData data = load_data(ctx.config);
  const std::size_t grid = ctx.config.get_size_or("grid_size", 25);
  const Matrix eval_inputs =
      probe_from(data.test, ctx.config.get_size_or("eval_size", 1024));

  const LayerDeviationReport report =
      layer_deviations(pair.a.arch, pair.a.weights, pair.b.weights, eval_inputs, grid);
  CsvWriter csv({"t", "layer", "dev_from_a", "dev_from_b", "energy_a"});
  for (std::size_t ti = 0; ti < report.t_grid.size(); ++ti) {
    for (std::size_t l = 0; l < report.energy_a.size(); ++l) {
      csv.cell(report.t_grid[ti]).cell(l + 1);
      csv.cell(report.dev_from_a[ti][l]).cell(report.dev_from_b[ti][l]);
      csv.cell(report.energy_a[l]);
      csv.end_row();
    }
  }
  csv.write_file(ctx.out_path("deviations.csv"));
}

void cmd_dim(const RunContext& ctx) {
  ctx.config.require_keys_within({"checkpoint", "data", "probe_size", "seed"});
  const std::string path = ctx.config.get_string("checkpoint");
  require_input_file(path);
  const Checkpoint ckpt = load_checkpoint(path);
  const LoadedData data = load_data(ctx.config);
  const Matrix probe = probe_from(data.test, ctx.config.get_size_or("probe_size", 1024));

  CsvWriter csv({"layer", "dim_w", "dim_w_sigma", "dim_sigma"});
  for (const LayerDims& row : dimension_table(ckpt.arch, ckpt.weights, probe)) {
    csv.cell(row.layer).cell(row.dim_w).cell(row.dim_w_sigma).cell(row.dim_sigma);
    csv.end_row();
  }
  csv.write_file(ctx.out_path("dim.csv"));
}

void cmd_rates(const RunContext& ctx) {
  ctx.config.require_keys_within(
      {"law", "n", "eigenvalues", "half_width", "m_values", "trials", "seed"});
  const std::string law_name = ctx.config.get_string_or("law", "gaussian");
  SampleLaw law;
  if (law_name == "gaussian") {
    const std::size_t n = ctx.config.get_size("n");
    CovarianceSpec spec = CovarianceSpec::isotropic(n, 1.0);
    if (ctx.config.has("eigenvalues")) {
      spec.eigenvalues = ctx.config.get_double_list("eigenvalues");
      spec.group_sizes.assign(spec.eigenvalues.size(), 1);
    }
    law = SampleLaw::gaussian(std::move(spec));
  } else if (law_name == "uniform") {
    law = SampleLaw::uniform(ctx.config.get_size("n"),
                             ctx.config.get_double_or("half_width", 1.0));
  } else {
    throw ConfigError("unknown law '" + law_name + "'");
  }
  const RateSweep sweep = empirical_rate(law, rate_options_from(ctx), RngState(ctx.seed()));
  write_rate_csv(ctx.out_path("rates.csv"), sweep);
}

void cmd_lowdim(const RunContext& ctx) {
  ctx.config.require_keys_within({"n", "k", "eta", "m_values", "trials", "seed"});
  const LowDimSweep result =
      lowdim_rate(ctx.config.get_size("n"), ctx.config.get_size("k"),
                  ctx.config.get_double("eta"), rate_options_from(ctx),
                  RngState(ctx.seed()));
  CsvWriter csv({"m", "mean_cost", "std_err", "slope", "intercept", "r_squared", "eta",
                 "regime_max_m"});
  for (const RatePoint& p : result.sweep.fit.points) {
    csv.cell(p.m).cell(p.mean_cost).cell(p.std_err);
    csv.cell(result.sweep.fit.slope).cell(result.sweep.fit.intercept);
    csv.cell(result.sweep.fit.r_squared);
    csv.cell(result.eta).cell(result.regime_max_m);
    csv.end_row();
  }
  csv.write_file(ctx.out_path("lowdim.csv"));
}

void cmd_lowerbound(const RunContext& ctx) {
  ctx.config.require_keys_within({"n", "m_values", "trials", "seed"});
  const RateSweep sweep = lower_bound_rate(ctx.config.get_size("n"),
                                           rate_options_from(ctx), RngState(ctx.seed()));
  write_rate_csv(ctx.out_path("lowerbound.csv"), sweep);
}

void cmd_gain(const RunContext& ctx) {
  ctx.config.require_keys_within({"n", "n_eff", "m_values", "trials", "seed"});
  const GainSweep sweep = gain_rates(ctx.config.get_size("n"), ctx.config.get_size("n_eff"),
                                     rate_options_from(ctx), RngState(ctx.seed()));
  CsvWriter csv({"method", "m", "mean_cost", "std_err", "slope", "intercept", "r_squared"});
  const auto emit = [&csv](const std::string& name, const RateSweep& s) {
    for (const RatePoint& p : s.fit.points) {
      csv.cell(name).cell(p.m).cell(p.mean_cost).cell(p.std_err);
      csv.cell(s.fit.slope).cell(s.fit.intercept).cell(s.fit.r_squared);
      csv.end_row();
    }
  };
  emit("naive", sweep.naive);
  emit("weighted", sweep.weighted);
  csv.write_file(ctx.out_path("gain.csv"));
}

void cmd_dropout(const RunContext& ctx) {
  ctx.config.require_keys_within(
      {"width", "input_dim", "eval_size", "nets", "activation", "seed"});
  const std::size_t width = ctx.config.get_size_or("width", 64);
  const std::size_t input_dim = ctx.config.get_size_or("input_dim", 4);
  const std::size_t eval_size = ctx.config.get_size_or("eval_size", 256);
  const std::size_t nets = ctx.config.get_size_or("nets", 100);
  const Activation activation =
      activation_from_string(ctx.config.get_string_or("activation", "relu"));

  Architecture arch;
  arch.dims = {input_dim, width, 1};
  arch.activation = activation;

  RngState master(ctx.seed());
  nlohmann::json report;
  report["nets"] = nlohmann::json::array();
  bool all_hold = true;
  for (std::size_t i = 0; i < nets; ++i) {
    RngState rng = master.child(i);
    MlpWeights weights = init_weights(arch, InitSpec::gaussian_iid(), rng);
    for (double& v : weights.layers[1].data()) v = 1.0 / static_cast<double>(width);
    // Inputs scaled into the unit ball, where the bound applies.
    Matrix inputs(input_dim, eval_size);
    for (std::size_t c = 0; c < eval_size; ++c) {
      for (std::size_t r = 0; r < input_dim; ++r) {
        inputs(r, c) = rng.next_uniform(-1.0, 1.0) / std::sqrt(static_cast<double>(input_dim));
      }
    }
    const DropoutGap gap = dropout_gap(arch, weights, inputs);
    const bool holds = gap.drop_error <= gap.w1_bound + 1e-9;
    all_hold = all_hold && holds;
    report["nets"].push_back({{"drop_error", gap.drop_error},
                              {"w1_bound", gap.w1_bound},
                              {"holds", holds}});
  }
  report["all_hold"] = all_hold;
  write_json_file(ctx.out_path("dropout.json"), report);
}

void cmd_meanfield(const RunContext& ctx) {
  ctx.config.require_keys_within({"input_dim", "width", "total_time", "step_size",
                                  "weight_decay", "noise_temperature", "activation",
                                  "eval_size", "grid_size", "shared_init", "seed"});
  MeanFieldConfig cfg;
  cfg.input_dim = ctx.config.get_size_or("input_dim", 4);
  cfg.width = ctx.config.get_size_or("width", 256);
  cfg.total_time = ctx.config.get_double_or("total_time", 2.0);
  cfg.step_size = ctx.config.get_double_or("step_size", 0.02);
  cfg.weight_decay = ctx.config.get_double_or("weight_decay", 0.0);
  cfg.noise_temperature = ctx.config.get_double_or("noise_temperature", 0.0);
  cfg.activation = activation_from_string(ctx.config.get_string_or("activation", "tanh"));
  cfg.eval_size = ctx.config.get_size_or("eval_size", 512);
  cfg.grid_size = ctx.config.get_size_or("grid_size", 25);
  cfg.shared_init = ctx.config.get_bool_or("shared_init", false);

  const MeanFieldReport report = meanfield_lmc(cfg, RngState(ctx.seed()));
  nlohmann::json doc;
  doc["width"] = report.width;
  doc["input_dim"] = report.input_dim;
  doc["steps"] = report.steps;
  doc["total_time"] = report.total_time;
  doc["step_size"] = report.step_size;
  doc["weight_decay"] = report.weight_decay;
  doc["noise_temperature"] = report.noise_temperature;
  doc["loss_a"] = report.loss_a;
  doc["loss_b"] = report.loss_b;
  doc["deviation_matched"] = report.deviation_matched;
  doc["deviation_identity"] = report.deviation_identity;
  doc["barrier_matched"] = report.barrier_matched;
  doc["barrier_identity"] = report.barrier_identity;
  doc["w2sq_matched"] = report.w2sq_matched;
  doc["w2sq_identity"] = report.w2sq_identity;
  write_json_file(ctx.out_path("meanfield.json"), doc);
}

void cmd_repro(const RunContext& ctx) {
  ctx.config.require_keys_within({"data", "width", "hidden_layers", "epochs", "batch_size",
                                  "learning_rates", "learning_rate", "probe_size",
                                  "grid_size", "loss", "seed"});
  const LoadedData data = load_data(ctx.config);

  std::vector<double> rates;
  if (ctx.config.has("learning_rates")) {
    rates = ctx.config.get_double_list("learning_rates");
  } else {
    rates.push_back(ctx.config.get_double_or("learning_rate", 1e-2));
  }
  if (rates.empty()) throw ConfigError("repro-mnist: no learning rates given");

  ReproOptions opts;
  opts.width = ctx.config.get_size_or("width", 256);
  opts.hidden_layers = ctx.config.get_size_or("hidden_layers", 3);
  opts.epochs = ctx.config.get_size_or("epochs", 2);
  opts.batch_size = ctx.config.get_size_or("batch_size", 128);
  opts.probe_size = ctx.config.get_size_or("probe_size", 1024);
  opts.grid_size = ctx.config.get_size_or("grid_size", 25);
  opts.loss = loss_from_string(ctx.config.get_string_or("loss", "cross_entropy"));
  opts.seed = ctx.seed();

  for (double lr : rates) {
    opts.learning_rate = lr;
    const std::vector<ReproRow> rows = repro_pipeline(data.train, data.test, opts);
    CsvWriter csv({"method", "layer", "cost", "dim", "barrier_raw", "barrier_clamped"});
    for (const ReproRow& row : rows) {
      csv.cell(row.method).cell(row.layer).cell(row.cost).cell(row.dim);
      csv.cell(row.barrier_raw).cell(row.barrier_clamped);
      csv.end_row();
    }
    csv.write_file(ctx.out_path("repro_lr" + format_double(lr) + ".csv"));
  }
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands = {
      "train",  "align",      "barrier", "deviations", "dim",       "rates",
      "lowdim", "lowerbound", "gain",    "dropout",    "meanfield", "repro-mnist"};
  return commands;
}

std::vector<ReproRow> repro_pipeline(const Dataset& train_set, const Dataset& test_set,
                                     const ReproOptions& opts) {
  Architecture arch;
  arch.dims.push_back(train_set.inputs.rows());
  for (std::size_t l = 0; l < opts.hidden_layers; ++l) arch.dims.push_back(opts.width);
  arch.dims.push_back(train_set.targets.rows());
  arch.validate();

  TrainConfig cfg;
  cfg.batch_size = opts.batch_size;
  cfg.step_size = opts.learning_rate;
  cfg.loss = opts.loss;
  const std::size_t per_epoch = (train_set.count() + cfg.batch_size - 1) / cfg.batch_size;
  cfg.steps = opts.epochs * per_epoch;

  RngState master(opts.seed);
  const auto train_one = [&](std::uint64_t stream) {
    RngState init_rng = master.child(2 * stream);
    MlpWeights w = init_weights(arch, InitSpec::gaussian_iid(), init_rng);
    return train(arch, std::move(w), train_set, cfg, master.child(2 * stream + 1)).weights;
  };
  const MlpWeights net_a = train_one(0);
  const MlpWeights net_b = train_one(1);

  Matrix probe(test_set.inputs.rows(), std::min(opts.probe_size, test_set.count()));
  for (std::size_t c = 0; c < probe.cols(); ++c) {
    for (std::size_t r = 0; r < probe.rows(); ++r) probe(r, c) = test_set.inputs(r, c);
  }

  std::vector<ReproRow> rows;
  for (const MatchKind kind :
       {MatchKind::naive_wm, MatchKind::cov_wm, MatchKind::activation_m}) {
    MatchMethod method;
    method.kind = kind;
    if (kind != MatchKind::naive_wm) method.probe = probe;
    const PermutationStack stack = match_layers(arch, net_a, net_b, method);

    const std::vector<LayerMatchReport> report =
        matching_report(arch, net_a, net_b, stack, probe);
    const MlpWeights net_b_perm = apply_stack(arch, net_b, stack);
    const BarrierCurve curve =
        barrier_curve(arch, net_a, net_b_perm, test_set, opts.loss, opts.grid_size);

    for (const LayerMatchReport& layer : report) {
      ReproRow row;
      row.method = to_string(kind);
      row.layer = layer.layer;
      switch (kind) {
        case MatchKind::naive_wm:
          row.cost = layer.cost_naive;
          row.dim = layer.dim_w;
          break;
        case MatchKind::cov_wm:
          row.cost = layer.cost_sigma;
          row.dim = layer.dim_w_sigma;
          break;
        case MatchKind::activation_m:
          row.cost = layer.cost_activation;
          row.dim = layer.dim_sigma;
          break;
      }
      row.barrier_raw = curve.barrier_raw;
      row.barrier_clamped = curve.barrier_clamped;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

int run_command(const std::string& command, const RunOptions& opts) {
  try {
    const auto& commands = known_commands();
    if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
      std::cerr << "error: unknown command '" << command << "'\n";
      return 2;
    }

    RunContext ctx{ExperimentConfig::parse_file(opts.config_path), fs::path(opts.out_dir),
                   resolve_thread_count(opts.threads)};
    if (opts.seed_override) ctx.config.raw()["seed"] = *opts.seed_override;
    fs::create_directories(ctx.out_dir);

    if (command == "train") cmd_train(ctx);
    else if (command == "align") cmd_align(ctx);
    else if (command == "barrier") cmd_barrier(ctx);
    else if (command == "deviations") cmd_deviations(ctx);
    else if (command == "dim") cmd_dim(ctx);
    else if (command == "rates") cmd_rates(ctx);
    else if (command == "lowdim") cmd_lowdim(ctx);
    else if (command == "lowerbound") cmd_lowerbound(ctx);
    else if (command == "gain") cmd_gain(ctx);
    else if (command == "dropout") cmd_dropout(ctx);
    else if (command == "meanfield") cmd_meanfield(ctx);
    else if (command == "repro-mnist") cmd_repro(ctx);

    // Echo the effective config next to the results.
    ctx.config.write_file(ctx.out_path("config.json"));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace permalign
