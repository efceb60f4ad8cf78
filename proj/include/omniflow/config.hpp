#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omniflow {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Ordered key-value store backing the plain-text sequence configs.
/// Format: one `key = value` per line, `#` starts a comment, blank lines
/// ignored, duplicate keys rejected.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, long long value);

  const std::string& get(const std::string& key) const;  // throws ConfigError when missing
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fallback) const;

  /// Parses a value holding exactly `n` whitespace-separated numbers.
  std::vector<double> get_numbers(const std::string& key, size_t n) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  const std::string* find(const std::string& key) const;

  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace omniflow
