#pragma once

#include <map>
#include <string>

#include "permalign/network.hpp"

namespace permalign {

/// Checkpoint container: architecture, weights, and free-form metadata.
///
/// On disk: magic "LMCK" | u16 LE format version | u32 LE header length |
/// UTF-8 JSON header {dims, activation, use_bias, metadata} | payload with
/// each weight matrix row-major as 64-bit LE floats, its bias vector
/// following directly when biases are present. Round trips are bit-exact.
struct Checkpoint {
  Architecture arch;
  MlpWeights weights;
  std::map<std::string, std::string> metadata;
};

inline constexpr std::uint16_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Architecture& arch,
                     const MlpWeights& weights,
                     const std::map<std::string, std::string>& metadata);

/// Throws BadMagicError, VersionError, TruncatedError or ShapeError for the
/// corresponding malformed inputs, IoError if the file cannot be read.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace permalign
