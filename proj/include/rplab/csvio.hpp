// rp-lab: deterministic text output helpers.
//
// All numeric output uses "%.17g" (shortest round-trippable double), LF line
// endings and the C locale, so identical runs produce byte-identical files.
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rplab {

inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_join(std::span<const std::string> cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

// Buffered CSV writer; the body is assembled in memory and flushed once, so a
// failed run never leaves a half-written table behind.
class CsvFile {
 public:
  explicit CsvFile(std::string path) : path_(std::move(path)) {}

  void header(std::span<const std::string> cells) { line(cells); }
  void row(std::span<const std::string> cells) { line(cells); }
  void row(std::initializer_list<std::string> cells) {
    line(std::span<const std::string>(cells.begin(), cells.size()));
  }

  void flush() {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path_);
    out << body_;
    if (!out) throw std::runtime_error("write failed: " + path_);
  }

  const std::string& body() const { return body_; }

 private:
  void line(std::span<const std::string> cells) {
    body_ += csv_join(cells);
    body_ += '\n';
  }
  std::string path_;
  std::string body_;
};

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// FNV-1a 64-bit content hash (labeled in manifests as "fnv1a64").
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace rplab
