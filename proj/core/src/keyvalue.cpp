#include "keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "jitterkit/error.hpp"

namespace jitterkit::detail {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile out;
  out.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t line_offset = offset;
    offset += line.size() + 1;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ": expected 'key = value'", line_offset);
    }
    std::string key = trim(body.substr(0, eq));
    // Values may legitimately contain '#' (citations); keep everything after '='.
    std::string value = trim(line.substr(line.find('=') + 1));
    if (key.empty()) throw ParseError(origin + ": empty key", line_offset);
    if (!out.values_.emplace(key, value).second) {
      throw ParseError(origin + ": duplicate key '" + key + "'", line_offset);
    }
  }
  return out;
}

KeyValueFile KeyValueFile::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::optional<std::string> KeyValueFile::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

const std::string& KeyValueFile::string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

double KeyValueFile::number(const std::string& key) const {
  const std::string& raw = string(key);
  double value = 0.0;
  const auto* end = raw.data() + raw.size();
  const auto [ptr, ec] = std::from_chars(raw.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(origin_ + ": key '" + key + "' is not a number: '" + raw + "'");
  }
  return value;
}

double KeyValueFile::number_or(const std::string& key, double fallback) const {
  return contains(key) ? number(key) : fallback;
}

}  // namespace jitterkit::detail
