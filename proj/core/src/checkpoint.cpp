#include "permalign/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "permalign/errors.hpp"

namespace permalign {

namespace {

constexpr char kMagic[4] = {'L', 'M', 'C', 'K'};

void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64le(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - at_; }

  void read_raw(char* dst, std::size_t n) {
    if (remaining() < n) throw TruncatedError("checkpoint ends prematurely");
    std::copy_n(bytes_.data() + at_, n, dst);
    at_ += n;
  }

  std::uint16_t read_u16le() {
    unsigned char b[2];
    read_raw(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t read_u32le() {
    unsigned char b[4];
    read_raw(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  double read_f64le() {
    unsigned char b[8];
    read_raw(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
  }

 private:
  const std::string& bytes_;
  std::size_t at_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const Architecture& arch,
                     const MlpWeights& weights,
                     const std::map<std::string, std::string>& metadata) {
  arch.validate();
  if (weights.layers.size() != arch.num_weight_layers()) {
    throw ArgumentError("save_checkpoint: weights do not match architecture");
  }

  nlohmann::json header;
  header["dims"] = arch.dims;
  header["activation"] = to_string(arch.activation);
  header["use_bias"] = arch.use_bias;
  header["metadata"] = metadata;
  const std::string header_text = header.dump();
  if (header_text.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ArgumentError("save_checkpoint: header too large");
  }

  std::string out;
  out.append(kMagic, 4);
  put_u16le(out, kCheckpointVersion);
  put_u32le(out, static_cast<std::uint32_t>(header_text.size()));
  out.append(header_text);
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    for (double v : weights.layers[l].data()) put_f64le(out, v);
    if (arch.use_bias) {
      for (double v : weights.biases[l]) put_f64le(out, v);
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open checkpoint '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(file)),
                    std::istreambuf_iterator<char>());

  Reader reader(bytes);
  char magic[4];
  reader.read_raw(magic, 4);
  if (!std::equal(magic, magic + 4, kMagic)) {
    throw BadMagicError("not a checkpoint file (bad magic)");
  }
  const std::uint16_t version = reader.read_u16le();
  if (version != kCheckpointVersion) {
    throw VersionError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t header_len = reader.read_u32le();
  if (reader.remaining() < header_len) {
    throw TruncatedError("checkpoint header extends past end of file");
  }
  std::string header_text(header_len, '\0');
  reader.read_raw(header_text.data(), header_len);

  Checkpoint ckpt;
  try {
    const nlohmann::json header = nlohmann::json::parse(header_text);
    ckpt.arch.dims = header.at("dims").get<std::vector<std::size_t>>();
    ckpt.arch.activation = activation_from_string(header.at("activation").get<std::string>());
    ckpt.arch.use_bias = header.at("use_bias").get<bool>();
    ckpt.metadata = header.at("metadata").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint header: ") + e.what());
  }
  if (ckpt.arch.dims.size() < 2) throw ShapeError("checkpoint: fewer than two dims");
  for (std::size_t d : ckpt.arch.dims) {
    if (d == 0) throw ShapeError("checkpoint: zero layer width");
  }

  // Total payload size in doubles, with overflow detection.
  std::size_t total_doubles = 0;
  for (std::size_t l = 0; l + 1 < ckpt.arch.dims.size(); ++l) {
    const std::size_t rows = ckpt.arch.dims[l + 1];
    const std::size_t cols = ckpt.arch.dims[l];
    if (rows != 0 && cols > std::numeric_limits<std::size_t>::max() / rows / 16) {
      throw ShapeError("checkpoint: layer shape overflows");
    }
    std::size_t n = rows * cols;
    if (ckpt.arch.use_bias) n += rows;
    if (total_doubles > std::numeric_limits<std::size_t>::max() - n) {
      throw ShapeError("checkpoint: total size overflows");
    }
    total_doubles += n;
  }
  if (reader.remaining() < total_doubles * 8) {
    throw TruncatedError("checkpoint payload is shorter than the declared shapes");
  }

  for (std::size_t l = 0; l + 1 < ckpt.arch.dims.size(); ++l) {
    const std::size_t rows = ckpt.arch.dims[l + 1];
    const std::size_t cols = ckpt.arch.dims[l];
    Matrix w(rows, cols);
    for (double& v : w.data()) v = reader.read_f64le();
    ckpt.weights.layers.push_back(std::move(w));
    if (ckpt.arch.use_bias) {
      std::vector<double> b(rows);
      for (double& v : b) v = reader.read_f64le();
      ckpt.weights.biases.push_back(std::move(b));
    }
  }
  return ckpt;
}

}  // namespace permalign
