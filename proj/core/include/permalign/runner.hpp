#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permalign/network.hpp"

namespace permalign {

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  /// 0 = resolve from LMC_THREADS or hardware concurrency.
  std::size_t threads = 0;
};

/// Executes one subcommand against the given config, writing every output
/// (plus the effective config echo) under out_dir. Returns 0 iff all
/// requested outputs were written; failures print to stderr.
///
/// Commands: train, align, barrier, deviations, dim, rates, lowdim,
/// lowerbound, gain, dropout, meanfield, repro-mnist.
int run_command(const std::string& command, const RunOptions& opts);

const std::vector<std::string>& known_commands();

/// One row of the end-to-end reproduction table: per matching method and
/// hidden layer, the method's own layer cost and implied matrix dimension,
/// plus the method's path barrier.
struct ReproRow {
  std::string method;
  std::size_t layer = 0;
  double cost = 0.0;
  double dim = 0.0;
  double barrier_raw = 0.0;
  double barrier_clamped = 0.0;
};

struct ReproOptions {
  std::size_t width = 256;
  std::size_t hidden_layers = 3;
  std::size_t epochs = 2;
  std::size_t batch_size = 128;
  double learning_rate = 1e-2;
  std::size_t probe_size = 1024;
  std::size_t grid_size = 25;
  LossKind loss = LossKind::cross_entropy;
  std::uint64_t seed = 0;
};

/// Trains a pair of MLPs on the given data, aligns them with all three
/// matching methods, and reports layer costs, dimensions, and barriers.
std::vector<ReproRow> repro_pipeline(const Dataset& train, const Dataset& test,
                                     const ReproOptions& opts);

}  // namespace permalign
