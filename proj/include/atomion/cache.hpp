#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "atomion/eigensolve.hpp"

namespace atomion {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Identifies one eigensolve: frame, parameters, grid, state count and tolerance.
struct CacheKey {
  Frame frame = Frame::cmf_relative;
  ModelParams params;
  ProductGrid grid;
  std::size_t states = 0;
  double tolerance = 0.0;

  std::string canonical() const;
  std::string hash() const;  ///< SHA-256 of canonical(), hex
  std::string filename() const;
};

struct CacheEntry {
  SpectrumRecord record;
  std::vector<WaveFn> states;
};

struct CacheListing {
  std::filesystem::path path;
  Frame frame = Frame::cmf_relative;
  std::string hash;
  double g = 0.0;
  double beta = 0.0;
  std::size_t states = 0;
  std::uintmax_t bytes = 0;
};

/// One little-endian file per key under `root`:
///   "ATMNEIG\0" u32 version | key hash | params | grid | records + amplitudes.
class EigenCache {
public:
  static constexpr std::uint32_t kVersion = 2;

  explicit EigenCache(std::filesystem::path root);
  const std::filesystem::path& root() const { return root_; }

  /// Empty if absent, unreadable, of another version, or written for another key.
  std::optional<CacheEntry> load(const CacheKey& key) const;
  void store(const CacheKey& key, const CacheEntry& entry) const;
  std::vector<CacheListing> list() const;
  /// Remove every entry whose hash starts with `prefix` ("" removes all).
  std::size_t remove(const std::string& prefix) const;

private:
  std::filesystem::path root_;
};

/// $ATOMION_CACHE, else ".atomion-cache".
std::string default_cache_root();

}  // namespace atomion
