#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spikecam {

// Ordered `key=value` text with '#' comments. Keys are unique.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

  // Replaces an existing value in place, or appends.
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, std::uint64_t value);
  void set(std::string key, bool value);

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string require(std::string_view key) const;

  // Typed lookups; ConfigError on malformed values.
  double get_double(std::string_view key, double fallback) const;
  std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  friend bool operator==(const KeyValueFile&, const KeyValueFile&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

}  // namespace spikecam
