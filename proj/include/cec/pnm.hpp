#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "cec/error.hpp"
#include "cec/image.hpp"

namespace cec {

namespace pnm_detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

struct Reader {
  std::string_view bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  char peek() const { return bytes[pos]; }

  // Whitespace and '#' comments are interchangeable between header tokens.
  void skip_space_and_comments() {
    while (!eof()) {
      if (is_space(peek())) {
        ++pos;
      } else if (peek() == '#') {
        while (!eof() && peek() != '\n') ++pos;
      } else {
        return;
      }
    }
  }

  unsigned read_uint(const char* what, unsigned limit) {
    skip_space_and_comments();
    if (eof() || peek() < '0' || peek() > '9') {
      throw ParseError::at_byte(std::string("expected ") + what, pos);
    }
    const std::size_t start = pos;
    std::uint64_t value = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      value = value * 10 + static_cast<unsigned>(peek() - '0');
      if (value > limit) {
        throw ParseError::at_byte(std::string(what) + " out of range", start);
      }
      ++pos;
    }
    return static_cast<unsigned>(value);
  }
};

}  // namespace pnm_detail

// Decodes P2/P3 (ASCII) and P5/P6 (binary) netpbm images with maxval <= 255.
// Samples are normalized to [0,1]. Failures throw ParseError carrying the
// byte offset.
inline RasterImage decode_pnm(std::string_view bytes) {
  pnm_detail::Reader r{bytes};
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw ParseError::at_byte("not a PNM file: bad magic", 0);
  }
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw ParseError::at_byte("unsupported PNM magic", 1);
  }
  r.pos = 2;
  const bool ascii = (kind == '2' || kind == '3');
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;

  const unsigned width = r.read_uint("width", 1000000000u);
  const unsigned height = r.read_uint("height", 1000000000u);
  if (width == 0 || height == 0) {
    throw ParseError::at_byte("zero dimension", r.pos);
  }
  const unsigned maxval = r.read_uint("maxval", 1000000000u);
  if (maxval == 0) {
    throw ParseError::at_byte("maxval must be positive", r.pos);
  }
  if (maxval > 255) {
    throw ParseError::at_byte("maxval exceeds 255", r.pos);
  }

  const std::uint64_t total =
      static_cast<std::uint64_t>(width) * height * static_cast<unsigned>(channels);
  // Every sample needs at least one byte, so a body shorter than `total`
  // can never be complete; this also rejects absurd headers before any
  // allocation happens.
  if (total > bytes.size() - std::min<std::size_t>(r.pos, bytes.size())) {
    throw ParseError::at_byte("truncated sample data", bytes.size());
  }

  RasterImage img(static_cast<int>(width), static_cast<int>(height), channels);
  const double scale = 1.0 / static_cast<double>(maxval);

  if (ascii) {
    for (std::uint64_t i = 0; i < total; ++i) {
      const unsigned v = r.read_uint("sample", 255u);
      if (v > maxval) {
        throw ParseError::at_byte("sample exceeds maxval", r.pos);
      }
      img.samples()[i] = v * scale;
    }
  } else {
    if (r.eof() || !pnm_detail::is_space(r.peek())) {
      throw ParseError::at_byte("expected single whitespace byte after maxval", r.pos);
    }
    ++r.pos;
    if (bytes.size() - r.pos < total) {
      throw ParseError::at_byte("truncated sample data", bytes.size());
    }
    for (std::uint64_t i = 0; i < total; ++i) {
      const unsigned v = static_cast<unsigned char>(bytes[r.pos + i]);
      if (v > maxval) {
        throw ParseError::at_byte("sample exceeds maxval", r.pos + i);
      }
      img.samples()[i] = v * scale;
    }
  }
  return img;
}

enum class PgmScale { linear, binary };

namespace pnm_detail {

inline std::string pgm_header(int width, int height) {
  return "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
}

}  // namespace pnm_detail

// P5 encoder. linear maps [min,max] onto 0..255 (all-equal input becomes 0);
// binary writes 255 for nonzero samples. Output bytes are deterministic.
inline std::string encode_pgm(const GrayImage& img, PgmScale scale) {
  std::string out = pnm_detail::pgm_header(img.width(), img.height());
  out.reserve(out.size() + img.size());
  if (scale == PgmScale::binary) {
    for (double v : img) out.push_back(v != 0.0 ? static_cast<char>(255) : '\0');
    return out;
  }
  double lo = img.cells().front();
  double hi = lo;
  for (double v : img) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) {
    out.append(img.size(), '\0');
    return out;
  }
  const double span = hi - lo;
  for (double v : img) {
    const long byte = std::lround(255.0 * (v - lo) / span);
    out.push_back(static_cast<char>(static_cast<unsigned char>(byte)));
  }
  return out;
}

inline std::string encode_pgm(const BinaryMask& mask) {
  std::string out = pnm_detail::pgm_header(mask.width(), mask.height());
  out.reserve(out.size() + mask.size());
  for (std::uint8_t v : mask) out.push_back(v ? static_cast<char>(255) : '\0');
  return out;
}

}  // namespace cec
