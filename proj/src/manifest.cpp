#include "urcminer/manifest.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "urcminer/common.hpp"

namespace urcminer {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw Error("sha256 init failed");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 0xF];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

nlohmann::json digests_json(const std::vector<FileDigest>& files) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& f : files) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return a;
}

std::vector<FileDigest> digests_from(const nlohmann::json& a) {
  std::vector<FileDigest> out;
  for (const auto& f : a) out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string Manifest::config_hash() const {
  nlohmann::json j{{"subcommand", subcommand}, {"config", config}, {"seeds", seeds}};
  return sha256_hex(j.dump());
}

std::string Manifest::digest() const { return sha256_hex(to_json()); }

std::string Manifest::to_json() const {
  nlohmann::json j;
  j["tool"] = tool;
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["config_hash"] = config_hash();
  j["seeds"] = seeds;
  j["inputs"] = digests_json(inputs);
  j["outputs"] = digests_json(outputs);
  return j.dump(2) + "\n";
}

Manifest Manifest::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Manifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    m.inputs = digests_from(j.at("inputs"));
    m.outputs = digests_from(j.at("outputs"));
    if (j.at("config_hash").get<std::string>() != m.config_hash()) {
      throw ValidationError("manifest config_hash does not match its config");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad manifest: ") + e.what());
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp =
      std::filesystem::path(path.string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move output into place: " + path.string());
  }
}

VerifyResult verify_manifest(const Manifest& manifest) {
  VerifyResult result;
  auto check = [&](const FileDigest& f, const char* role) {
    std::string actual;
    try {
      actual = sha256_file(f.path);
    } catch (const Error&) {
      result.ok = false;
      result.mismatches.push_back(std::string(role) + " " + f.path + ": missing");
      return;
    }
    if (actual != f.sha256) {
      result.ok = false;
      result.mismatches.push_back(std::string(role) + " " + f.path + ": digest " + actual +
                                  " != recorded " + f.sha256);
    }
  };
  for (const auto& f : manifest.inputs) check(f, "input");
  for (const auto& f : manifest.outputs) check(f, "output");
  return result;
}

}  // namespace urcminer
