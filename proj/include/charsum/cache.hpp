#pragma once

// Small binary blob cache with atomic replacement.
//
// File layout (little-endian, matching the host):
//   bytes 0..3   magic "CSL1"
//   u32          kind  (caller-chosen tag, e.g. dlog vs gauss)
//   u64          param (usually the modulus or prime)
//   u64          payload size in bytes
//   payload
//
// Writers dump to "<name>.tmp.<pid>" and rename over the target, so a
// concurrent reader either sees the old complete file or the new one.

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace charsum::cache {

inline constexpr char kMagic[4] = {'C', 'S', 'L', '1'};

enum : uint32_t {
  kKindDlog = 1,
  kKindGauss = 2,
  kKindCoeff = 3,
  kKindWeight = 4,
};

inline std::filesystem::path root() {
  if (const char* env = std::getenv("CHARSUM_CACHE_DIR"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path("cache");
}

template <typename T>
bool load(const std::string& rel, uint32_t kind, uint64_t param,
          std::vector<T>& out) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::ifstream in(root() / rel, std::ios::binary);
  if (!in) return false;
  char magic[4];
  uint32_t k = 0;
  uint64_t p = 0, bytes = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&k), sizeof k);
  in.read(reinterpret_cast<char*>(&p), sizeof p);
  in.read(reinterpret_cast<char*>(&bytes), sizeof bytes);
  if (!in || std::memcmp(magic, kMagic, 4) != 0 || k != kind || p != param ||
      bytes % sizeof(T) != 0)
    return false;
  out.resize(bytes / sizeof(T));
  in.read(reinterpret_cast<char*>(out.data()), (std::streamsize)bytes);
  return bool(in);
}

template <typename T>
void store(const std::string& rel, uint32_t kind, uint64_t param,
           const std::vector<T>& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  auto target = root() / rel;
  std::error_code ec;
  std::filesystem::create_directories(target.parent_path(), ec);
  auto tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;  // cache is best-effort
    uint64_t bytes = v.size() * sizeof(T);
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kind), sizeof kind);
    out.write(reinterpret_cast<const char*>(&param), sizeof param);
    out.write(reinterpret_cast<const char*>(&bytes), sizeof bytes);
    out.write(reinterpret_cast<const char*>(v.data()), (std::streamsize)bytes);
    if (!out) {
      std::filesystem::remove(tmp, ec);
      return;
    }
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace charsum::cache
