#pragma once

// Run manifests: a JSON record written atomically next to every output.

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <string>
#include <string_view>

#include "coin/binio.hpp"
#include "json.hpp"

namespace coin::cli {

/// Hex SHA-1 of "blob <size>\0<content>", the git object id of the bytes.
inline std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx, content.data(), content.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha1 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Manifest {
 public:
  explicit Manifest(std::string command) : started_(utc_timestamp()) { doc_["command"] = std::move(command); }

  void config(nlohmann::ordered_json cfg) { doc_["config"] = std::move(cfg); }
  void seed(std::uint64_t master) { doc_["master_seed"] = master; }

  /// Hashes an input file; the combined hash covers every input in order.
  void input(const std::filesystem::path& path) {
    const std::string hash = git_blob_hash(binio::read_file(path));
    inputs_.push_back({{"path", path.string()}, {"sha1", hash}});
    combined_ += hash;
  }

  void output(const std::filesystem::path& path) { outputs_.push_back(path.string()); }

  /// Writes `<path>.manifest.json`.
  void write_next_to(const std::filesystem::path& path) {
    nlohmann::ordered_json doc = doc_;
    doc["inputs"] = inputs_;
    doc["input_hash"] = git_blob_hash(combined_);
    doc["outputs"] = outputs_;
    doc["started_at"] = started_;
    doc["finished_at"] = utc_timestamp();
    binio::write_file_atomic(path.string() + ".manifest.json", doc.dump(2) + "\n");
  }

 private:
  nlohmann::ordered_json doc_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
  std::string combined_;
  std::string started_;
};

}  // namespace coin::cli
