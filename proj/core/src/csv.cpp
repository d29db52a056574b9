#include "permalign/csv.hpp"

#include <charconv>
#include <fstream>

#include "permalign/errors.hpp"

namespace permalign {

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(columns.size()) {
  if (columns.empty()) throw ArgumentError("csv: need at least one column");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

void CsvWriter::separator() {
  if (in_row_ >= columns_) throw ArgumentError("csv: row has too many cells");
  if (in_row_ > 0) text_ += ',';
  ++in_row_;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  text_ += format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::size_t v) {
  separator();
  text_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  separator();
  text_ += v;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw ArgumentError("csv: row is missing cells");
  text_ += '\n';
  in_row_ = 0;
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file.write(text_.data(), static_cast<std::streamsize>(text_.size()));
  if (!file) throw IoError("failed writing '" + path + "'");
}

}  // namespace permalign
