#pragma once

// Content-addressed artifact store. Each entry is <key>.bin plus a JSON
// sidecar <key>.json carrying the kind, the SHA-256 of the payload and
// free-form metadata.

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace mfglab::cache {

struct Artifact {
  std::string bytes;
  /// Flat string metadata, stored in the sidecar.
  std::map<std::string, std::string> meta;
};

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t evictions = 0;
  std::size_t producer_calls = 0;
};

class ArtifactCache {
 public:
  explicit ArtifactCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// Key for `kind` artifacts derived from `inputs`.
  static std::string make_key(const std::string& kind, const std::string& inputs);

  /// Verified read. nullopt when absent; a checksum or sidecar mismatch
  /// evicts the entry and throws CorruptCacheError.
  std::optional<Artifact> lookup(const std::string& key);

  void store(const std::string& key, const std::string& kind, const Artifact& artifact);

  /// Cached artifact, or producer() stored and returned. Corrupt entries
  /// are evicted and recomputed.
  Artifact get_or_compute(const std::string& key, const std::string& kind,
                          const std::function<Artifact()>& producer);

  void evict(const std::string& key);

  CacheStats stats() const;

 private:
  std::filesystem::path payload_path(const std::string& key) const;
  std::filesystem::path sidecar_path(const std::string& key) const;
  std::mutex& key_mutex(const std::string& key);

  std::filesystem::path dir_;
  std::mutex table_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> key_mutexes_;
  std::atomic<std::size_t> hits_{0}, misses_{0}, evictions_{0}, producer_calls_{0};
};

}  // namespace mfglab::cache
