#include "permalign/config.hpp"

#include <algorithm>
#include <fstream>

#include "permalign/errors.hpp"

namespace permalign {

ExperimentConfig::ExperimentConfig(nlohmann::json doc) : doc_(std::move(doc)) {
  if (!doc_.is_object()) throw ConfigError("config must be a JSON object");
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return ExperimentConfig(std::move(doc));
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());
  return parse_text(text);
}

std::string ExperimentConfig::serialize() const { return doc_.dump(2) + "\n"; }

void ExperimentConfig::write_file(const std::string& path) const {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  const std::string text = serialize();
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("failed writing '" + path + "'");
}

void ExperimentConfig::require_keys_within(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : doc_.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

const nlohmann::json& ExperimentConfig::require(const std::string& key) const {
  if (!doc_.contains(key)) throw ConfigError("missing config key '" + key + "'");
  return doc_.at(key);
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    throw ConfigError("config key '" + key + "' must be an integer");
  }
  return v.get<std::uint64_t>();
}

std::uint64_t ExperimentConfig::get_u64_or(const std::string& key,
                                           std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

std::size_t ExperimentConfig::get_size(const std::string& key) const {
  return static_cast<std::size_t>(get_u64(key));
}

std::size_t ExperimentConfig::get_size_or(const std::string& key,
                                          std::size_t fallback) const {
  return has(key) ? get_size(key) : fallback;
}

double ExperimentConfig::get_double(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

double ExperimentConfig::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::string ExperimentConfig::get_string(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string ExperimentConfig::get_string_or(const std::string& key,
                                            const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

bool ExperimentConfig::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = doc_.at(key);
  if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<std::size_t> ExperimentConfig::get_size_list(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<std::size_t> out;
  for (const auto& item : v) {
    if (!item.is_number_unsigned() && !item.is_number_integer()) {
      throw ConfigError("config key '" + key + "' must hold integers");
    }
    out.push_back(item.get<std::size_t>());
  }
  return out;
}

std::vector<double> ExperimentConfig::get_double_list(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& item : v) {
    if (!item.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

}  // namespace permalign
