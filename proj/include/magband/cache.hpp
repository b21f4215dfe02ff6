#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "magband/config.hpp"
#include "magband/io.hpp"

namespace magband {

// Band-sweep cache: raw double arrays keyed by a content hash of
// (potential, field, basis, grid). Binary payload so a hit is bit-identical.
class BandCache {
 public:
  static constexpr std::uint32_t kVersion = 1;

  struct Payload {
    std::vector<double> k_grid;
    std::vector<double> values;  // row-major, k-major then band index
    int j_count = 0;
  };

  explicit BandCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::uint64_t key(const RunConfig& c) {
    ContentHash h;
    h.add(std::string("bands"));
    h.add(c.period);
    for (double v : c.cos_coeffs) h.add(v);
    h.add(std::string("/sin"));
    for (double v : c.sin_coeffs) h.add(v);
    h.add(c.b);
    h.add(static_cast<std::int64_t>(c.N));
    h.add(static_cast<std::int64_t>(c.quad_order()));
    h.add(static_cast<std::int64_t>(c.j_max));
    h.add(static_cast<std::int64_t>(c.k_grid));
    return h.value();
  }

  std::optional<Payload> load(std::uint64_t key) const {
    std::ifstream in(path_(key), std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8] = {};
    in.read(magic, 8);
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (std::memcmp(magic, "MBCACHE\0", 8) != 0 || version != kVersion)
      return std::nullopt;  // stale or foreign: caller recomputes and overwrites
    std::uint64_t nk = 0;
    std::uint32_t j_count = 0;
    in.read(reinterpret_cast<char*>(&nk), sizeof(nk));
    in.read(reinterpret_cast<char*>(&j_count), sizeof(j_count));
    Payload p;
    p.j_count = static_cast<int>(j_count);
    p.k_grid.resize(nk);
    p.values.resize(nk * j_count);
    in.read(reinterpret_cast<char*>(p.k_grid.data()), nk * sizeof(double));
    in.read(reinterpret_cast<char*>(p.values.data()), p.values.size() * sizeof(double));
    if (!in) return std::nullopt;
    return p;
  }

  void store(std::uint64_t key, const Payload& p) const {
    std::filesystem::create_directories(dir_);
    std::ofstream out(path_(key), std::ios::binary | std::ios::trunc);
    out.write("MBCACHE\0", 8);
    const std::uint32_t version = kVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const std::uint64_t nk = p.k_grid.size();
    const std::uint32_t j_count = static_cast<std::uint32_t>(p.j_count);
    out.write(reinterpret_cast<const char*>(&nk), sizeof(nk));
    out.write(reinterpret_cast<const char*>(&j_count), sizeof(j_count));
    out.write(reinterpret_cast<const char*>(p.k_grid.data()), nk * sizeof(double));
    out.write(reinterpret_cast<const char*>(p.values.data()),
              p.values.size() * sizeof(double));
  }

  std::filesystem::path path_(std::uint64_t key) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx.mbc", static_cast<unsigned long long>(key));
    return dir_ / buf;
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace magband
