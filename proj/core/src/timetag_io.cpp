#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "jitterkit/correlation.hpp"
#include "jitterkit/error.hpp"

namespace jitterkit {
namespace {

constexpr std::array<char, 4> kMagic{'T', 'T', 'G', '1'};
constexpr std::size_t kHeaderBytes = 12;

std::uint64_t read_u64_le(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void append_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void finish(TimeTagStream& s, bool have_duration, const LoadOptions& options) {
  if (!std::is_sorted(s.tags.begin(), s.tags.end())) {
    if (!options.sort) {
      throw ConfigError("time tags are not sorted (pass the sort option to accept them)");
    }
    std::sort(s.tags.begin(), s.tags.end());
  }
  if (!have_duration) s.duration_ps = s.tags.empty() ? 0 : s.tags.back();
  validate(s);
}

}  // namespace

void validate(const TimeTagStream& stream) {
  if (stream.duration_ps < 0) throw ConfigError("negative acquisition duration");
  if (!std::is_sorted(stream.tags.begin(), stream.tags.end())) {
    throw ConfigError("time tags are not sorted");
  }
  if (!stream.tags.empty() &&
      (stream.tags.front() < 0 || stream.tags.back() > stream.duration_ps)) {
    throw ConfigError("time tags outside [0, duration]");
  }
}

TimeTagFormat parse_timetag_format(const std::string& s) {
  if (s == "csv") return TimeTagFormat::Csv;
  if (s == "bin" || s == "binary") return TimeTagFormat::Binary;
  throw ConfigError("unknown time-tag format '" + s + "' (expected csv or bin)");
}

TimeTagFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".bin" || ext == ".ttg") ? TimeTagFormat::Binary : TimeTagFormat::Csv;
}

TimeTagStream parse_timetags_csv(const std::string& text, const LoadOptions& options) {
  TimeTagStream s;
  s.channel = options.channel;
  bool have_duration = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    const std::size_t line_offset = pos;
    pos = end + 1;

    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) {
      line.remove_prefix(1);
    }
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "duration_ps=";
      const auto k = line.find(key);
      if (k != std::string_view::npos) {
        const auto value = line.substr(k + key.size());
        Picoseconds d = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
        if (ec != std::errc{} || ptr != value.data() + value.size() || d < 0) {
          throw ParseError("bad duration header", line_offset);
        }
        s.duration_ps = d;
        have_duration = true;
      }
      continue;
    }
    Picoseconds tag = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), tag);
    if (ec != std::errc{} || ptr != line.data() + line.size() || tag < 0) {
      throw ParseError("malformed time tag '" + std::string(line) + "'", line_offset);
    }
    s.tags.push_back(tag);
  }
  finish(s, have_duration, options);
  return s;
}

TimeTagStream parse_timetags_binary(const std::string& bytes, const LoadOptions& options) {
  if (bytes.size() < kHeaderBytes) throw ParseError("truncated TTG1 header", 0);
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw ParseError("missing TTG1 magic", 0);
  }
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (payload % 8 != 0) {
    throw ParseError("trailing partial record", kHeaderBytes + payload - payload % 8);
  }
  constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<Picoseconds>::max());
  TimeTagStream s;
  s.channel = options.channel;
  const std::uint64_t duration = read_u64_le(bytes.data() + 4);
  if (duration > kMax) throw ParseError("duration exceeds signed 64-bit range", 4);
  s.duration_ps = static_cast<Picoseconds>(duration);
  s.tags.reserve(payload / 8);
  for (std::size_t off = kHeaderBytes; off < bytes.size(); off += 8) {
    const std::uint64_t v = read_u64_le(bytes.data() + off);
    if (v > kMax) throw ParseError("time tag exceeds signed 64-bit range", off);
    s.tags.push_back(static_cast<Picoseconds>(v));
  }
  finish(s, true, options);
  return s;
}

TimeTagStream load_timetags(const std::filesystem::path& path, TimeTagFormat format,
                            const LoadOptions& options) {
  const std::string bytes = read_all(path);
  try {
    return format == TimeTagFormat::Csv ? parse_timetags_csv(bytes, options)
                                        : parse_timetags_binary(bytes, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

void save_timetags(const TimeTagStream& stream, const std::filesystem::path& path,
                   TimeTagFormat format) {
  validate(stream);
  std::string out;
  if (format == TimeTagFormat::Csv) {
    out = "# duration_ps=" + std::to_string(stream.duration_ps) + "\n";
    out.reserve(out.size() + stream.tags.size() * 14);
    char buf[24];
    for (const Picoseconds t : stream.tags) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, t);
      out.append(buf, ptr);
      out.push_back('\n');
    }
  } else {
    out.reserve(kHeaderBytes + 8 * stream.tags.size());
    out.append(kMagic.begin(), kMagic.end());
    append_u64_le(out, static_cast<std::uint64_t>(stream.duration_ps));
    for (const Picoseconds t : stream.tags) append_u64_le(out, static_cast<std::uint64_t>(t));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace jitterkit
