#pragma once

#include "config.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#ifndef RYDCZ_VERSION
#define RYDCZ_VERSION "0.1.0"
#endif
#ifndef RYDCZ_GIT_REVISION
#define RYDCZ_GIT_REVISION "unknown"
#endif

namespace rydcz {

// unwritable output; maps to exit code 4
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string version_string() { return std::string(RYDCZ_VERSION) + "+g" + RYDCZ_GIT_REVISION; }

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string config_hash(const RunConfig& c) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(serialize_config(c));
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = hex[h & 15];
  return s;
}

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) throw IoError("cannot create output directory '" + dir_.string() + "'");
  }

  const std::filesystem::path& path() const { return dir_; }

  template <class Fn>
  void write(const std::string& name, Fn&& fill) {
    const auto p = dir_ / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw IoError("cannot open '" + p.string() + "' for writing");
    fill(os);
    os.flush();
    if (!os) throw IoError("write to '" + p.string() + "' failed");
    files_.push_back(name);
  }

  void write_text(const std::string& name, const std::string& text) {
    write(name, [&](std::ostream& os) { os << text; });
  }

  const std::vector<std::string>& files() const { return files_; }

  // config + seed + N + version: enough to rerun bit-identically
  void write_manifest(const RunConfig& c, const std::string& command, const nlohmann::json& extra = {}) {
    nlohmann::json m;
    m["command"] = command;
    m["version"] = version_string();
    m["config_hash"] = config_hash(c);
    m["seed"] = c.sampling.seed;
    m["samples"] = c.sampling.samples;
    m["paper_scale"] = c.paper_scale;
    m["config"] = to_json(c);
    m["files"] = files_;
    if (!extra.is_null()) m["details"] = extra;
    write_text("manifest.json", m.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

}  // namespace rydcz
