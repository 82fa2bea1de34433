#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cec/quaternion.hpp"

namespace cec {

// Dense row-major W x H grid addressed as (x, y) with y growing downward.
// clamped() applies replicate-border indexing.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("grid dimensions must be positive");
    }
    cells_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }

  T& operator()(int x, int y) {
    assert(in_bounds(x, y));
    return cells_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const {
    assert(in_bounds(x, y));
    return cells_[static_cast<std::size_t>(y) * width_ + x];
  }

  const T& clamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return (*this)(x, y);
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  bool same_size(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::vector<T>& cells() { return cells_; }
  const std::vector<T>& cells() const { return cells_; }

  auto begin() { return cells_.begin(); }
  auto end() { return cells_.end(); }
  auto begin() const { return cells_.begin(); }
  auto end() const { return cells_.end(); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

using GrayImage = Grid<double>;
using MagnitudeMap = Grid<double>;
using BinaryMask = Grid<std::uint8_t>;
using QuaternionImage = Grid<Quaternion>;

// Interleaved 1- or 3-channel raster with real-valued samples; decoders
// normalize to [0,1], in-memory construction may use any range.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("image dimensions must be positive");
    }
    if (channels != 1 && channels != 3) {
      throw std::invalid_argument("image must have 1 or 3 channels");
    }
    samples_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  double& sample(int x, int y, int c) {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_ && c >= 0 && c < channels_);
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double sample(int x, int y, int c) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_ && c >= 0 && c < channels_);
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::array<double, 3> rgb(int x, int y) const {
    assert(channels_ == 3);
    const std::size_t base = (static_cast<std::size_t>(y) * width_ + x) * 3;
    return {samples_[base], samples_[base + 1], samples_[base + 2]};
  }

  std::vector<double>& samples() { return samples_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<double> samples_;
};

// Pixel (r,g,b) -> pure quaternion r*i + g*j + b*k.
inline QuaternionImage to_quaternion_image(const RasterImage& img) {
  if (img.channels() != 3) {
    throw std::invalid_argument("quaternion encoding requires a 3-channel image");
  }
  QuaternionImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out(x, y) = Quaternion::pure(img.sample(x, y, 0), img.sample(x, y, 1),
                                   img.sample(x, y, 2));
    }
  }
  return out;
}

// ITU-R 601 luma for 3-channel input, identity for 1-channel.
inline GrayImage to_grayscale(const RasterImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.channels() == 3) {
        out(x, y) = 0.299 * img.sample(x, y, 0) + 0.587 * img.sample(x, y, 1) +
                    0.114 * img.sample(x, y, 2);
      } else {
        out(x, y) = img.sample(x, y, 0);
      }
    }
  }
  return out;
}

// Nonzero sample in any channel marks the pixel.
inline BinaryMask mask_from_image(const RasterImage& img) {
  BinaryMask out(img.width(), img.height(), 0);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        if (img.sample(x, y, c) > 0.0) {
          out(x, y) = 1;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace cec
