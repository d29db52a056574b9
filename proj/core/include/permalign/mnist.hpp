#pragma once

#include <string>
#include <vector>

#include "permalign/matrix.hpp"
#include "permalign/network.hpp"

namespace permalign {

/// Images flattened row-major to 784 columns of pixel values in [0, 1]
/// (raw bytes / 255), with one class label per image.
struct MnistSplit {
  Matrix images;            // 784 x count
  std::vector<int> labels;  // count entries, 0..9
};

/// Parses the big-endian IDX pair: images under magic 0x00000803 with dims
/// [count, 28, 28], labels under magic 0x00000801. Wrong magic raises
/// FormatError, image/label count disagreement ConsistencyError, and a
/// short file IoError.
MnistSplit load_mnist_idx(const std::string& images_path, const std::string& labels_path);

/// MnistSplit as a Dataset with one-hot targets for the regression loss.
Dataset mnist_to_dataset(const MnistSplit& split, std::size_t classes = 10);

}  // namespace permalign
