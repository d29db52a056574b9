#pragma once

#include <cstdint>

#include "permalign/network.hpp"

namespace permalign {

/// Offline stand-in for the image data: class prototype vectors in [0, 1]^d
/// plus clipped Gaussian pixel noise, so the classes form learnable blobs.
struct SynthSpec {
  std::size_t input_dim = 784;
  std::size_t classes = 10;
  std::size_t train_count = 8192;
  std::size_t test_count = 2048;
  double noise = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthData {
  Dataset train;
  Dataset test;
};

SynthData make_synth_classification(const SynthSpec& spec);

}  // namespace permalign
