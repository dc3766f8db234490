#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace urcminer {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::string sha256;
};

// Provenance record written next to every output as <output>.manifest.json.
// It holds no timestamps or host data, so equal inputs give byte-equal
// manifests.
struct Manifest {
  std::string tool = "urcminer";
  std::string version;
  std::string subcommand;
  std::map<std::string, std::string> config;  // flag name -> value
  std::map<std::string, std::uint64_t> seeds;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  // sha256 over subcommand, config and seeds.
  std::string config_hash() const;
  // sha256 over the whole manifest, inputs and outputs included.
  std::string digest() const;

  std::string to_json() const;
  static Manifest from_json(std::string_view text);
};

std::filesystem::path manifest_path_for(const std::filesystem::path& output);

// Writes `content` to a sibling temp file and renames it over `path`, so an
// interrupted run never leaves a partial output.
void atomic_write(const std::filesystem::path& path, std::string_view content);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> mismatches;  // human-readable, one per file
};

// Recomputes every input and output digest listed in the manifest.
VerifyResult verify_manifest(const Manifest& manifest);

}  // namespace urcminer
