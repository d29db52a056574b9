#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace permalign {

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

/// Minimal CSV builder: a fixed header row, then typed cells. Numeric cells
/// use shortest round-trip formatting so reruns diff byte for byte.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  CsvWriter& cell(double v);
  CsvWriter& cell(std::size_t v);
  CsvWriter& cell(const std::string& v);
  void end_row();

  const std::string& str() const { return text_; }
  void write_file(const std::string& path) const;

 private:
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
  std::string text_;

  void separator();
};

}  // namespace permalign
