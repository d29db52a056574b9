#include "permalign/mnist.hpp"

#include <cstdint>
#include <fstream>

#include "permalign/errors.hpp"

namespace permalign {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(file)),
                     std::istreambuf_iterator<char>());
}

std::uint32_t read_u32be(const std::string& bytes, std::size_t at) {
  if (bytes.size() < at + 4) throw IoError("IDX file truncated");
  const auto b = [&](std::size_t i) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i]));
  };
  return (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
}

}  // namespace

MnistSplit load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
  const std::string image_bytes = read_file(images_path);
  const std::string label_bytes = read_file(labels_path);

  if (read_u32be(image_bytes, 0) != kImageMagic) {
    throw FormatError("'" + images_path + "' is not an IDX image file");
  }
  const std::uint32_t image_count = read_u32be(image_bytes, 4);
  const std::uint32_t rows = read_u32be(image_bytes, 8);
  const std::uint32_t cols = read_u32be(image_bytes, 12);
  if (rows != 28 || cols != 28) {
    throw FormatError("expected 28x28 images, got " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  if (image_bytes.size() < 16 + static_cast<std::size_t>(image_count) * pixels) {
    throw IoError("'" + images_path + "' is shorter than its declared image count");
  }

  if (read_u32be(label_bytes, 0) != kLabelMagic) {
    throw FormatError("'" + labels_path + "' is not an IDX label file");
  }
  const std::uint32_t label_count = read_u32be(label_bytes, 4);
  if (label_bytes.size() < 8 + static_cast<std::size_t>(label_count)) {
    throw IoError("'" + labels_path + "' is shorter than its declared label count");
  }
  if (image_count != label_count) {
    throw ConsistencyError("image count " + std::to_string(image_count) +
                           " does not match label count " + std::to_string(label_count));
  }

  MnistSplit split;
  split.images = Matrix(pixels, image_count);
  for (std::size_t c = 0; c < image_count; ++c) {
    const std::size_t base = 16 + c * pixels;
    for (std::size_t p = 0; p < pixels; ++p) {
      split.images(p, c) =
          static_cast<double>(static_cast<unsigned char>(image_bytes[base + p])) / 255.0;
    }
  }
  split.labels.resize(label_count);
  for (std::size_t c = 0; c < label_count; ++c) {
    split.labels[c] = static_cast<unsigned char>(label_bytes[8 + c]);
  }
  return split;
}

Dataset mnist_to_dataset(const MnistSplit& split, std::size_t classes) {
  Dataset data;
  data.inputs = split.images;
  data.labels = split.labels;
  data.targets = Matrix(classes, split.labels.size());
  for (std::size_t c = 0; c < split.labels.size(); ++c) {
    const int label = split.labels[c];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw ConsistencyError("label out of range: " + std::to_string(label));
    }
    data.targets(static_cast<std::size_t>(label), c) = 1.0;
  }
  data.validate();
  return data;
}

}  // namespace permalign
