#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace permalign {

/// One JSON document per run. Parsing normalizes the document (sorted keys,
/// canonical number formatting), so serialize(parse(doc)) is stable and a
/// config echoed next to its results reruns identically.
class ExperimentConfig {
 public:
  ExperimentConfig() : doc_(nlohmann::json::object()) {}
  explicit ExperimentConfig(nlohmann::json doc);

  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);

  const nlohmann::json& raw() const { return doc_; }
  nlohmann::json& raw() { return doc_; }

  /// Normalized form: sorted keys, two-space indent, trailing newline.
  std::string serialize() const;
  void write_file(const std::string& path) const;

  bool has(const std::string& key) const { return doc_.contains(key); }

  /// Rejects top-level keys outside `allowed`.
  void require_keys_within(const std::vector<std::string>& allowed) const;

  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
  std::size_t get_size(const std::string& key) const;
  std::size_t get_size_or(const std::string& key, std::size_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::vector<std::size_t> get_size_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

 private:
  nlohmann::json doc_;

  const nlohmann::json& require(const std::string& key) const;
};

}  // namespace permalign
