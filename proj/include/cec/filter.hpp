#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "cec/image.hpp"
#include "cec/quaternion.hpp"

namespace cec {

// 3x3 hypercomplex mask: each nonzero cell contributes
// sign * left * f * right, scaled by `normalizer` after summation. The
// difference structure (three +1 cells against three -1 cells) cancels on
// homogeneous regions.
struct QuaternionMask {
  std::array<Quaternion, 9> left{};   // row-major, entries 0 or R
  std::array<Quaternion, 9> right{};  // row-major, entries 0 or R~
  std::array<int, 9> sign{};          // +1, -1, 0
  double normalizer = 1.0 / 6.0;
};

struct MaskPair {
  QuaternionMask horizontal;  // responds to horizontal edges (row difference)
  QuaternionMask vertical;    // transpose structure (column difference)
};

struct ResponsePair {
  QuaternionImage horizontal;  // q_h
  QuaternionImage vertical;    // q_v
};

// Horizontal mask: top row +R.f.R~, bottom row -R.f.R~, middle zero, so
// output(x,y) = (1/6) * [sum_d R f(x+d,y-1) R~  -  sum_d R f(x+d,y+1) R~].
// The vertical mask is the transpose (left column + / right column -).
inline MaskPair build_masks(const RotationOperator& rot) {
  MaskPair masks;
  const Quaternion r = rot.r;
  const Quaternion rc = conj(rot.r);
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      const int idx = row * 3 + col;
      const int row_sign = (row == 0) ? 1 : (row == 2) ? -1 : 0;
      const int col_sign = (col == 0) ? 1 : (col == 2) ? -1 : 0;
      masks.horizontal.sign[idx] = row_sign;
      masks.vertical.sign[idx] = col_sign;
      if (row_sign != 0) {
        masks.horizontal.left[idx] = r;
        masks.horizontal.right[idx] = rc;
      }
      if (col_sign != 0) {
        masks.vertical.left[idx] = r;
        masks.vertical.right[idx] = rc;
      }
    }
  }
  return masks;
}

namespace filter_detail {

// Positive and negative window sums are accumulated separately and
// subtracted once, so identical neighborhoods cancel exactly.
inline Quaternion apply_mask(const QuaternionImage& img, const QuaternionMask& mask,
                             int x, int y) {
  Quaternion plus{};
  Quaternion minus{};
  int idx = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx, ++idx) {
      const int s = mask.sign[idx];
      if (s == 0) continue;
      const Quaternion term = mask.left[idx] * img.clamped(x + dx, y + dy) * mask.right[idx];
      if (s > 0) {
        plus += term;
      } else {
        minus += term;
      }
    }
  }
  return (plus - minus) * mask.normalizer;
}

}  // namespace filter_detail

// Applies both directional masks with replicate padding; output dimensions
// match the input and responses stay pure up to rounding.
inline ResponsePair quaternion_convolve(const QuaternionImage& img, const MaskPair& masks) {
  if (img.width() < 3 || img.height() < 3) {
    throw std::invalid_argument("quaternion_convolve requires at least a 3x3 image");
  }
  ResponsePair resp{QuaternionImage(img.width(), img.height()),
                    QuaternionImage(img.width(), img.height())};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      resp.horizontal(x, y) = filter_detail::apply_mask(img, masks.horizontal, x, y);
      resp.vertical(x, y) = filter_detail::apply_mask(img, masks.vertical, x, y);
    }
  }
  return resp;
}

// Per-pixel vector-part modulus of each directional response.
inline std::pair<MagnitudeMap, MagnitudeMap> modulus_maps(const ResponsePair& resp) {
  MagnitudeMap q1(resp.horizontal.width(), resp.horizontal.height());
  MagnitudeMap q2(resp.vertical.width(), resp.vertical.height());
  for (std::size_t i = 0; i < resp.horizontal.size(); ++i) {
    const Quaternion& h = resp.horizontal.cells()[i];
    const Quaternion& v = resp.vertical.cells()[i];
    q1.cells()[i] = std::sqrt(h.x * h.x + h.y * h.y + h.z * h.z);
    q2.cells()[i] = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  }
  return {std::move(q1), std::move(q2)};
}

inline MagnitudeMap combined_modulus(const MagnitudeMap& q1, const MagnitudeMap& q2) {
  if (!q1.same_size(q2)) {
    throw std::invalid_argument("combined_modulus requires equally sized maps");
  }
  MagnitudeMap m(q1.width(), q1.height());
  for (std::size_t i = 0; i < q1.size(); ++i) {
    m.cells()[i] = std::sqrt(q1.cells()[i] * q1.cells()[i] + q2.cells()[i] * q2.cells()[i]);
  }
  return m;
}

}  // namespace cec
