#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "mfglab/cache.hpp"
#include "mfglab/errors.hpp"

using namespace mfglab;
using namespace mfglab::cache;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mfglab-cache-test-" + std::to_string(std::random_device{}()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Artifact sample() { return {"payload bytes", {{"t0", "0"}}}; }

}  // namespace

TEST_CASE("keys are stable and kind-prefixed") {
  const auto k = ArtifactCache::make_key("path", "n=64");
  CHECK(k.rfind("path-", 0) == 0);
  CHECK(k == ArtifactCache::make_key("path", "n=64"));
  CHECK(k != ArtifactCache::make_key("path", "n=32"));
}

TEST_CASE("store and lookup") {
  TempDir tmp;
  ArtifactCache cache(tmp.path);
  const auto key = ArtifactCache::make_key("path", "a");
  CHECK_FALSE(cache.lookup(key).has_value());
  cache.store(key, "path", sample());
  const auto got = cache.lookup(key);
  REQUIRE(got.has_value());
  CHECK(got->bytes == "payload bytes");
  CHECK(got->meta.at("t0") == "0");
  CHECK(fs::exists(tmp.path / (key + ".json")));
  // only get_or_compute counts hits and misses
  CHECK(cache.stats().hits == 0);
}

TEST_CASE("a corrupted payload is evicted and reported") {
  TempDir tmp;
  ArtifactCache cache(tmp.path);
  const auto key = ArtifactCache::make_key("path", "b");
  cache.store(key, "path", sample());
  std::ofstream(tmp.path / (key + ".bin"), std::ios::binary) << "payload bytez";
  CHECK_THROWS_AS(cache.lookup(key), CorruptCacheError);
  CHECK_FALSE(fs::exists(tmp.path / (key + ".bin")));
  CHECK(cache.stats().evictions == 1);
  CHECK_FALSE(cache.lookup(key).has_value());

  cache.store(key, "path", sample());
  std::ofstream(tmp.path / (key + ".json")) << "{ not json";
  CHECK_THROWS_AS(cache.lookup(key), CorruptCacheError);
}

TEST_CASE("get_or_compute runs the producer once and recovers from corruption") {
  TempDir tmp;
  ArtifactCache cache(tmp.path);
  const auto key = ArtifactCache::make_key("kernel", "c");
  int calls = 0;
  auto producer = [&] {
    ++calls;
    return sample();
  };
  CHECK(cache.get_or_compute(key, "kernel", producer).bytes == "payload bytes");
  CHECK(cache.get_or_compute(key, "kernel", producer).bytes == "payload bytes");
  CHECK(calls == 1);
  CHECK(cache.stats().hits == 1);
  CHECK(cache.stats().misses == 1);

  std::ofstream(tmp.path / (key + ".bin"), std::ios::binary) << "truncated";
  CHECK(cache.get_or_compute(key, "kernel", producer).bytes == "payload bytes");
  CHECK(calls == 2);
  const auto s = cache.stats();
  CHECK(s.producer_calls == 2);
  CHECK(s.evictions == 1);

  // a fresh cache over the same directory sees the stored entry
  ArtifactCache again(tmp.path);
  CHECK(again.get_or_compute(key, "kernel", producer).bytes == "payload bytes");
  CHECK(calls == 2);
  CHECK(again.stats().hits == 1);
}
