#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "magband/errors.hpp"

namespace magband {

// Shortest decimal representation that round-trips to the same double;
// keeps CSV outputs byte-reproducible.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw numerics_error("format_double failed");
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw config_error("cannot open output file: " + path);
  }

  void header(const std::vector<std::string>& cols) { line_(cols); }

  void row(const std::vector<double>& vals) {
    std::vector<std::string> cells;
    cells.reserve(vals.size());
    for (double v : vals) cells.push_back(format_double(v));
    line_(cells);
  }

  void row_cells(const std::vector<std::string>& cells) { line_(cells); }

 private:
  void line_(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::ofstream out_;
};

// FNV-1a over raw bytes; content keys are built from bit patterns of the
// inputs so a cache key is stable across runs.
class ContentHash {
 public:
  ContentHash& add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ull;
    }
    return *this;
  }
  ContentHash& add(double v) { return add_bytes(&v, sizeof(v)); }
  ContentHash& add(std::int64_t v) { return add_bytes(&v, sizeof(v)); }
  ContentHash& add(const std::string& s) { return add_bytes(s.data(), s.size()); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace magband
