#include "cli/uncertain.hpp"

#include <charconv>
#include <cmath>

#include "jitterkit/error.hpp"

namespace jitterkit::cli {
namespace {

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc() && r.ptr == end && std::isfinite(out);
}

}  // namespace

Uncertain parse_uncertain(const std::string& text, const std::string& flag) {
  Uncertain u;
  const auto comma = text.find(',');
  const std::string_view all(text);
  const bool ok = comma == std::string::npos
                      ? parse_double(all, u.value)
                      : parse_double(all.substr(0, comma), u.value) &&
                            parse_double(all.substr(comma + 1), u.error);
  if (!ok || u.error < 0.0) {
    throw ConfigError(flag + ": expected 'value' or 'value,error' with error >= 0, got '" + text +
                      "'");
  }
  return u;
}

std::string to_string(const Uncertain& u) { return exact(u.value) + "," + exact(u.error); }

std::string exact(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace jitterkit::cli
