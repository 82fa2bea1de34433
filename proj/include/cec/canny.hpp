#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cec/image.hpp"

namespace cec {

struct GradientField {
  GrayImage gx;
  GrayImage gy;
  MagnitudeMap magnitude;  // sqrt(gx^2 + gy^2)
  GrayImage direction;     // atan2(gy, gx), in (-pi, pi]
};

// Thresholds are fractions of the post-NMS maximum magnitude; sigma is the
// Gaussian smoothing std-dev applied before the gradient (0 disables it).
struct HysteresisParams {
  double high_frac = 0.15;
  double low_frac = 0.05;
  double sigma = 0.0;
};

inline void validate(const HysteresisParams& p) {
  if (!(p.low_frac > 0.0) || !(p.low_frac < p.high_frac) || !(p.high_frac <= 1.0)) {
    throw std::invalid_argument("thresholds must satisfy 0 < low_frac < high_frac <= 1");
  }
  if (!(p.sigma >= 0.0)) {
    throw std::invalid_argument("sigma must be non-negative");
  }
}

enum class EdgeLabel : std::uint8_t { none = 0, weak = 1, strong = 2 };

// Per-pixel strong/weak/none classification and the final binary mask
// (strong pixels plus weak pixels 8-connected to a strong one).
struct EdgeMap {
  Grid<EdgeLabel> labels;
  BinaryMask mask;

  int width() const { return mask.width(); }
  int height() const { return mask.height(); }
};

// Separable Gaussian, kernel radius ceil(3*sigma), replicate borders.
inline GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
  if (sigma < 0.0) {
    throw std::invalid_argument("sigma must be non-negative");
  }
  if (sigma == 0.0) return img;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> weights(2 * radius + 1);
  double total = 0.0;
  for (int d = -radius; d <= radius; ++d) {
    weights[d + radius] = std::exp(-(static_cast<double>(d) * d) / (2.0 * sigma * sigma));
    total += weights[d + radius];
  }
  for (double& w : weights) w /= total;

  GrayImage tmp(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += weights[d + radius] * img.clamped(x + d, y);
      tmp(x, y) = acc;
    }
  }
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += weights[d + radius] * tmp.clamped(x, y + d);
      out(x, y) = acc;
    }
  }
  return out;
}

inline double gradient_direction(double gx, double gy) {
  if (gx == 0.0 && gy == 0.0) return 0.0;
  double d = std::atan2(gy, gx);
  if (d <= -std::numbers::pi) d = std::numbers::pi;
  return d;
}

inline GrayImage gradient_direction(const GrayImage& gx, const GrayImage& gy) {
  if (!gx.same_size(gy)) {
    throw std::invalid_argument("gradient_direction requires equally sized grids");
  }
  GrayImage out(gx.width(), gx.height());
  for (std::size_t i = 0; i < gx.size(); ++i) {
    out.cells()[i] = gradient_direction(gx.cells()[i], gy.cells()[i]);
  }
  return out;
}

// 3x3 Sobel with replicate borders. Each component is computed as the
// difference of the two weighted column (row) sums, so homogeneous
// neighborhoods cancel exactly.
inline GradientField sobel_gradients(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw std::invalid_argument("sobel_gradients requires at least a 3x3 image");
  }
  GradientField f{GrayImage(img.width(), img.height()), GrayImage(img.width(), img.height()),
                  MagnitudeMap(img.width(), img.height()), GrayImage(img.width(), img.height())};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double right = img.clamped(x + 1, y - 1) + 2.0 * img.clamped(x + 1, y) +
                           img.clamped(x + 1, y + 1);
      const double left = img.clamped(x - 1, y - 1) + 2.0 * img.clamped(x - 1, y) +
                          img.clamped(x - 1, y + 1);
      const double bottom = img.clamped(x - 1, y + 1) + 2.0 * img.clamped(x, y + 1) +
                            img.clamped(x + 1, y + 1);
      const double top = img.clamped(x - 1, y - 1) + 2.0 * img.clamped(x, y - 1) +
                         img.clamped(x + 1, y - 1);
      const double gx = right - left;
      const double gy = bottom - top;
      f.gx(x, y) = gx;
      f.gy(x, y) = gy;
      f.magnitude(x, y) = std::sqrt(gx * gx + gy * gy);
      f.direction(x, y) = gradient_direction(gx, gy);
    }
  }
  return f;
}

namespace canny_detail {

// Quantizes a direction to one of four bins (0, 45, 90, 135 degrees mod 180)
// and returns the neighbor offset along the gradient.
inline std::pair<int, int> direction_offset(double direction) {
  double deg = direction * 180.0 / std::numbers::pi;
  deg = std::fmod(deg, 180.0);
  if (deg < 0.0) deg += 180.0;
  if (deg < 22.5 || deg >= 157.5) return {1, 0};
  if (deg < 67.5) return {1, 1};
  if (deg < 112.5) return {0, 1};
  return {-1, 1};
}

}  // namespace canny_detail

// Keeps pixels whose magnitude is >= both neighbors along the quantized
// gradient direction (ties keep); suppressed pixels become 0.
inline MagnitudeMap non_max_suppress(const MagnitudeMap& magnitude, const GrayImage& direction) {
  if (!magnitude.same_size(direction)) {
    throw std::invalid_argument("non_max_suppress requires equally sized grids");
  }
  MagnitudeMap out(magnitude.width(), magnitude.height());
  for (int y = 0; y < magnitude.height(); ++y) {
    for (int x = 0; x < magnitude.width(); ++x) {
      const auto [dx, dy] = canny_detail::direction_offset(direction(x, y));
      const double m = magnitude(x, y);
      const bool keep = m >= magnitude.clamped(x + dx, y + dy) &&
                        m >= magnitude.clamped(x - dx, y - dy);
      out(x, y) = keep ? m : 0.0;
    }
  }
  return out;
}

// Double-threshold classification relative to the map maximum, then flood
// fill from strong pixels through 8-connected weak ones. An all-zero map
// yields an empty edge map.
inline EdgeMap hysteresis(const MagnitudeMap& magnitude, const HysteresisParams& params) {
  validate(params);
  EdgeMap em{Grid<EdgeLabel>(magnitude.width(), magnitude.height(), EdgeLabel::none),
             BinaryMask(magnitude.width(), magnitude.height(), 0)};
  double mmax = 0.0;
  for (double v : magnitude) mmax = std::max(mmax, v);
  if (mmax == 0.0) return em;

  const double high = params.high_frac * mmax;
  const double low = params.low_frac * mmax;

  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < magnitude.height(); ++y) {
    for (int x = 0; x < magnitude.width(); ++x) {
      const double m = magnitude(x, y);
      if (m >= high) {
        em.labels(x, y) = EdgeLabel::strong;
        em.mask(x, y) = 1;
        stack.emplace_back(x, y);
      } else if (m >= low) {
        em.labels(x, y) = EdgeLabel::weak;
      }
    }
  }
  while (!stack.empty()) {
    const auto [cx, cy] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = cx + dx;
        const int ny = cy + dy;
        if (!em.mask.in_bounds(nx, ny)) continue;
        if (em.labels(nx, ny) == EdgeLabel::weak && !em.mask(nx, ny)) {
          em.mask(nx, ny) = 1;
          stack.emplace_back(nx, ny);
        }
      }
    }
  }
  return em;
}

}  // namespace cec
