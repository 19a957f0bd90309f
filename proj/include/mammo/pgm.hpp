#pragma once

// Netpbm graymap (PGM) reader/writer. Reads P5 (binary) and P2 (ASCII) with
// maxval <= 255; always writes P5.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/image.hpp"

namespace mammo {

namespace detail {

class PgmCursor {
 public:
  explicit PgmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments that run to end of line.
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Reads a non-negative decimal integer token. Returns -1 if none is present.
  long long read_uint() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) return -1;
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1LL << 40)) return -1;
      ++pos_;
    }
    return v;
  }

  bool at_end() const noexcept { return pos_ >= bytes_.size(); }
  std::size_t pos() const noexcept { return pos_; }
  std::uint8_t peek() const noexcept { return bytes_[pos_]; }
  void advance() noexcept { ++pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw MalformedHeader("expected magic P5 or P2");
  }
  const bool binary = bytes[1] == '5';
  detail::PgmCursor cur(bytes.subspan(2));
  if (!cur.at_end() && !std::isspace(cur.peek()) && cur.peek() != '#') {
    throw MalformedHeader("magic must be followed by whitespace");
  }

  const long long width = cur.read_uint();
  const long long height = cur.read_uint();
  if (width < 1 || height < 1) throw MalformedHeader("bad dimensions");
  if (width * height > (1LL << 31)) throw MalformedHeader("image too large");
  const long long maxval = cur.read_uint();
  if (maxval < 1) throw MalformedHeader("bad maxval");
  if (maxval > 255) throw UnsupportedMaxval("maxval " + std::to_string(maxval) + " > 255");

  const auto n = static_cast<std::size_t>(width * height);
  std::vector<double> px(n);

  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    if (cur.at_end() || !std::isspace(cur.peek())) {
      throw TruncatedData("missing raster after header");
    }
    cur.advance();
    if (cur.remaining() < n) {
      throw TruncatedData("expected " + std::to_string(n) + " samples, got " +
                          std::to_string(cur.remaining()));
    }
    const std::size_t base = 2 + cur.pos();
    for (std::size_t i = 0; i < n; ++i) {
      const auto s = bytes[base + i];
      if (s > maxval) throw MalformedHeader("sample exceeds maxval");
      px[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long long s = cur.read_uint();
      if (s < 0) {
        throw TruncatedData("expected " + std::to_string(n) + " samples, got " +
                            std::to_string(i));
      }
      if (s > maxval) throw MalformedHeader("sample exceeds maxval");
      px[i] = static_cast<double>(s);
    }
  }
  return GrayImage(static_cast<int>(height), static_cast<int>(width), std::move(px));
}

inline GrayImage load_pgm(std::string_view text) {
  return load_pgm(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

/// Encodes as binary P5 with maxval 255; intensities are quantized first.
inline std::vector<std::uint8_t> save_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + img.size());
  for (double v : img.pixels()) out.push_back(static_cast<std::uint8_t>(quantize_value(v)));
  return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path);
}

inline GrayImage read_pgm_file(const std::string& path) {
  return load_pgm(std::span<const std::uint8_t>(read_file_bytes(path)));
}

inline void write_pgm_file(const std::string& path, const GrayImage& img) {
  write_file_bytes(path, save_pgm(img));
}

}  // namespace mammo
