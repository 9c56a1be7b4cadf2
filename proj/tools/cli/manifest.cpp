#include "cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include "jitterkit/error.hpp"

namespace jitterkit::cli {

using nlohmann::json;

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

std::vector<std::string> RunManifest::command_line() const {
  std::vector<std::string> args{subcommand};
  for (const auto& [flag, value] : options) {
    args.push_back(flag);
    if (!value.empty()) args.push_back(value);
  }
  return args;
}

namespace {

json records(const std::vector<FileRecord>& files) {
  json out = json::array();
  for (const auto& f : files) {
    out.push_back({{"option", f.option}, {"path", f.path}, {"sha256", f.sha256}});
  }
  return out;
}

std::vector<FileRecord> records_from(const json& j) {
  std::vector<FileRecord> out;
  for (const auto& f : j) {
    out.push_back({f.at("option").get<std::string>(), f.at("path").get<std::string>(),
                   f.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

json to_json(const RunManifest& m) {
  json options = json::array();
  for (const auto& [flag, value] : m.options) options.push_back({flag, value});
  json out = {{"tool", "jitterkit"},
              {"version", m.version},
              {"subcommand", m.subcommand},
              {"options", std::move(options)},
              {"config", m.config},
              {"inputs", records(m.inputs)},
              {"outputs", records(m.outputs)},
              {"seed", nullptr},
              {"exit_code", m.exit_code},
              {"timestamp", m.timestamp}};
  if (m.seed) out["seed"] = *m.seed;
  return out;
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    for (const auto& o : j.at("options")) {
      m.options.emplace_back(o.at(0).get<std::string>(), o.at(1).get<std::string>());
    }
    m.config = j.value("config", json::object());
    m.inputs = records_from(j.at("inputs"));
    m.outputs = records_from(j.at("outputs"));
    if (j.contains("seed") && !j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.exit_code = j.value("exit_code", 0);
    m.version = j.value("version", "");
    m.timestamp = j.value("timestamp", "");
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return output.string() + ".manifest.json";
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(m).dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace jitterkit::cli
