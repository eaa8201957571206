#include "mfglab/cache.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>

#include "mfglab/config.hpp"
#include "mfglab/errors.hpp"

namespace mfglab::cache {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSidecarVersion = 1;

std::optional<std::string> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Write to a temporary sibling, then rename, so readers never see half a file.
void write_atomically(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to cache file " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ArtifactCache::ArtifactCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string ArtifactCache::make_key(const std::string& kind, const std::string& inputs) {
  return kind + "-" + config::sha256_hex(kind + "\n" + inputs);
}

fs::path ArtifactCache::payload_path(const std::string& key) const { return dir_ / (key + ".bin"); }
fs::path ArtifactCache::sidecar_path(const std::string& key) const { return dir_ / (key + ".json"); }

std::mutex& ArtifactCache::key_mutex(const std::string& key) {
  std::lock_guard lock(table_mutex_);
  auto& slot = key_mutexes_[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void ArtifactCache::evict(const std::string& key) {
  std::error_code ec;
  fs::remove(payload_path(key), ec);
  fs::remove(sidecar_path(key), ec);
  ++evictions_;
}

std::optional<Artifact> ArtifactCache::lookup(const std::string& key) {
  const auto sidecar = slurp(sidecar_path(key));
  const auto payload = slurp(payload_path(key));
  if (!sidecar && !payload) return std::nullopt;
  auto corrupt = [&](const std::string& why) {
    evict(key);
    return CorruptCacheError("cache entry " + key + " is corrupt (" + why + "); evicted");
  };
  if (!sidecar || !payload) throw corrupt("missing half of the entry");
  json meta;
  try {
    meta = json::parse(*sidecar);
  } catch (const json::exception&) {
    throw corrupt("unreadable sidecar");
  }
  if (!meta.is_object() || meta.value("key", "") != key || !meta.contains("checksum"))
    throw corrupt("sidecar does not describe this key");
  if (meta.value("checksum", "") != config::sha256_hex(*payload)) throw corrupt("checksum mismatch");
  Artifact a;
  a.bytes = *payload;
  if (meta.contains("meta") && meta["meta"].is_object()) {
    for (const auto& [k, v] : meta["meta"].items()) {
      if (v.is_string()) a.meta[k] = v.get<std::string>();
    }
  }
  return a;
}

void ArtifactCache::store(const std::string& key, const std::string& kind, const Artifact& artifact) {
  json meta = {{"version", kSidecarVersion},
               {"key", key},
               {"kind", kind},
               {"checksum", config::sha256_hex(artifact.bytes)},
               {"size", artifact.bytes.size()},
               {"created", utc_now()},
               {"meta", artifact.meta}};
  // payload first: a sidecar only ever points at a complete payload
  write_atomically(payload_path(key), artifact.bytes);
  write_atomically(sidecar_path(key), meta.dump(2));
}

Artifact ArtifactCache::get_or_compute(const std::string& key, const std::string& kind,
                                       const std::function<Artifact()>& producer) {
  std::lock_guard lock(key_mutex(key));
  try {
    if (auto hit = lookup(key)) {
      ++hits_;
      return *hit;
    }
  } catch (const CorruptCacheError&) {
    // already evicted by lookup; fall through and recompute
  }
  ++misses_;
  ++producer_calls_;
  Artifact a = producer();
  store(key, kind, a);
  return a;
}

CacheStats ArtifactCache::stats() const {
  return {hits_.load(), misses_.load(), evictions_.load(), producer_calls_.load()};
}

}  // namespace mfglab::cache
