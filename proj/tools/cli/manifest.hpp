#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace jitterkit::cli {

/// Hex SHA-256 of a file's bytes. Throws IoError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

struct FileRecord {
  std::string option;  // flag that named the file, e.g. "--out-a"
  std::string path;    // absolute
  std::string sha256;
};

/// Everything needed to rerun one invocation: the subcommand, every option
/// with its resolved value (defaults included), and digests of the files read
/// and written.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> options;  // flag, value ("" for switches)
  nlohmann::json config;
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  std::optional<std::uint64_t> seed;
  int exit_code = 0;
  std::string version;
  std::string timestamp;

  /// Command line that reproduces the run, without the program name.
  std::vector<std::string> command_line() const;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Manifest path paired with an output file.
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace jitterkit::cli
