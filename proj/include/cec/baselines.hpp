#pragma once

#include <algorithm>
#include <stdexcept>

#include "cec/canny.hpp"
#include "cec/image.hpp"

namespace cec {

inline constexpr double kDefaultSobelThresholdFrac = 0.2;

inline HysteresisParams classic_canny_defaults() {
  return HysteresisParams{0.15, 0.05, 1.0};
}

// Sobel magnitude thresholded at a fraction of its maximum; all marked
// pixels are labeled strong. A flat image yields an empty map.
inline EdgeMap sobel_edges(const RasterImage& img, double threshold_frac) {
  if (!(threshold_frac > 0.0) || !(threshold_frac <= 1.0)) {
    throw std::invalid_argument("threshold fraction must be in (0, 1]");
  }
  const GradientField grad = sobel_gradients(to_grayscale(img));
  EdgeMap em{Grid<EdgeLabel>(grad.magnitude.width(), grad.magnitude.height(), EdgeLabel::none),
             BinaryMask(grad.magnitude.width(), grad.magnitude.height(), 0)};
  double mmax = 0.0;
  for (double v : grad.magnitude) mmax = std::max(mmax, v);
  if (mmax == 0.0) return em;
  const double threshold = threshold_frac * mmax;
  for (int y = 0; y < em.height(); ++y) {
    for (int x = 0; x < em.width(); ++x) {
      if (grad.magnitude(x, y) >= threshold) {
        em.labels(x, y) = EdgeLabel::strong;
        em.mask(x, y) = 1;
      }
    }
  }
  return em;
}

// Classical grayscale Canny: smooth, Sobel, NMS, hysteresis.
inline EdgeMap classic_canny(const RasterImage& img, const HysteresisParams& params) {
  validate(params);
  const GrayImage smoothed = gaussian_smooth(to_grayscale(img), params.sigma);
  const GradientField grad = sobel_gradients(smoothed);
  const MagnitudeMap thinned = non_max_suppress(grad.magnitude, grad.direction);
  return hysteresis(thinned, params);
}

}  // namespace cec
