#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace jitterkit::detail {

/// Flat `key = value` text with `#` comments. Keys are unique.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin);
  static KeyValueFile read(const std::filesystem::path& path);

  const std::string& origin() const noexcept { return origin_; }
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> find(const std::string& key) const;
  const std::string& string(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
};

}  // namespace jitterkit::detail
