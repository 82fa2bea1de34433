#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>

#include "cec/error.hpp"
#include "cec/image.hpp"

namespace cec {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;  // row-major

struct EigenResult {
  Vec3 values{};   // descending
  Mat3 vectors{};  // orthonormal columns; vectors[r][c] = component r of axis c
};

// Cyclic Jacobi eigensolver for symmetric 3x3 matrices. Sweeps until the
// largest off-diagonal entry is at most 1e-12 (100 sweep cap). Eigenvector
// signs are fixed so the largest-magnitude component is positive, first such
// component on ties.
inline EigenResult jacobi_eig(const Mat3& input) {
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(input[i][j] - input[j][i]) > 1e-9) {
        throw std::invalid_argument("jacobi_eig requires a symmetric matrix");
      }
    }
  }
  Mat3 a{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      a[i][j] = 0.5 * (input[i][j] + input[j][i]);
    }
  }
  Mat3 v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  constexpr std::array<std::pair<int, int>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};
  const double kOffTol = 1e-12;
  bool converged = false;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (auto [p, q] : kPairs) off = std::max(off, std::abs(a[p][q]));
    if (off <= kOffTol) {
      converged = true;
      break;
    }
    for (auto [p, q] : kPairs) {
      const double apq = a[p][q];
      if (apq == 0.0) continue;
      const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
      double t;
      if (std::abs(theta) > 1e150) {
        t = 1.0 / (2.0 * theta);
      } else {
        t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
      }
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;

      const double app = a[p][p];
      const double aqq = a[q][q];
      a[p][p] = app - t * apq;
      a[q][q] = aqq + t * apq;
      a[p][q] = a[q][p] = 0.0;
      const int r = 3 - p - q;  // the remaining index
      const double arp = a[r][p];
      const double arq = a[r][q];
      a[r][p] = a[p][r] = c * arp - s * arq;
      a[r][q] = a[q][r] = s * arp + c * arq;

      for (int row = 0; row < 3; ++row) {
        const double vp = v[row][p];
        const double vq = v[row][q];
        v[row][p] = c * vp - s * vq;
        v[row][q] = s * vp + c * vq;
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (auto [p, q] : kPairs) off = std::max(off, std::abs(a[p][q]));
    if (off > kOffTol) {
      throw NumericError("jacobi_eig did not converge in 100 sweeps");
    }
  }

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int lhs, int rhs) { return a[lhs][lhs] > a[rhs][rhs]; });

  EigenResult result;
  for (int c = 0; c < 3; ++c) {
    const int src = order[c];
    result.values[c] = a[src][src];
    Vec3 col{v[0][src], v[1][src], v[2][src]};
    int lead = 0;
    for (int r = 1; r < 3; ++r) {
      if (std::abs(col[r]) > std::abs(col[lead])) lead = r;
    }
    if (col[lead] < 0.0) {
      for (double& e : col) e = -e;
    }
    for (int r = 0; r < 3; ++r) result.vectors[r][c] = col[r];
  }
  return result;
}

// Per-image RGB statistics: mean, covariance with 1/b normalization over the
// b = W*H pixel observations, and its eigendecomposition.
struct PcaModel {
  Vec3 mean{};
  Mat3 cov{};
  Vec3 eigenvalues{};
  Mat3 eigenvectors{};
  std::size_t count = 0;
};

inline PcaModel fit_pca(const RasterImage& img) {
  if (img.channels() != 3) {
    throw std::invalid_argument("fit_pca requires a 3-channel image");
  }
  const std::size_t b = img.pixel_count();
  if (b < 2) {
    throw std::invalid_argument("fit_pca requires at least two pixels");
  }
  PcaModel model;
  model.count = b;
  // Accumulate deviations from the first pixel: less cancellation on
  // clustered data, and a constant image gets an exactly zero covariance.
  const Vec3 origin{img.sample(0, 0, 0), img.sample(0, 0, 1), img.sample(0, 0, 2)};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) model.mean[c] += img.sample(x, y, c) - origin[c];
    }
  }
  for (int c = 0; c < 3; ++c) {
    model.mean[c] = origin[c] + model.mean[c] / static_cast<double>(b);
  }

  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Vec3 d{img.sample(x, y, 0) - model.mean[0],
                   img.sample(x, y, 1) - model.mean[1],
                   img.sample(x, y, 2) - model.mean[2]};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) model.cov[i][j] += d[i] * d[j];
      }
    }
  }
  for (auto& row : model.cov) {
    for (double& e : row) e /= static_cast<double>(b);
  }

  const EigenResult eig = jacobi_eig(model.cov);
  model.eigenvalues = eig.values;
  model.eigenvectors = eig.vectors;
  return model;
}

// Coefficient of each mean-adjusted pixel along the first principal axis;
// the contrast-maximizing scalar channel the gradient stage consumes.
inline GrayImage pca_coefficient_channel(const RasterImage& img, const PcaModel& model) {
  if (img.channels() != 3) {
    throw std::invalid_argument("pca_coefficient_channel requires a 3-channel image");
  }
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double c = 0.0;
      for (int r = 0; r < 3; ++r) {
        c += model.eigenvectors[r][0] * (img.sample(x, y, r) - model.mean[r]);
      }
      out(x, y) = c;
    }
  }
  return out;
}

// Rank-k reconstruction: mean + Y_k (Y_k^T (pixel - mean)). rank=3 reproduces
// the input up to rounding.
inline RasterImage pca_reconstruct(const RasterImage& img, const PcaModel& model, int rank) {
  if (img.channels() != 3) {
    throw std::invalid_argument("pca_reconstruct requires a 3-channel image");
  }
  if (rank < 1 || rank > 3) {
    throw std::invalid_argument("pca_reconstruct rank must be in 1..3");
  }
  RasterImage out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Vec3 phi{img.sample(x, y, 0) - model.mean[0],
                     img.sample(x, y, 1) - model.mean[1],
                     img.sample(x, y, 2) - model.mean[2]};
      Vec3 coeffs{};
      for (int j = 0; j < rank; ++j) {
        for (int r = 0; r < 3; ++r) coeffs[j] += model.eigenvectors[r][j] * phi[r];
      }
      for (int r = 0; r < 3; ++r) {
        double value = model.mean[r];
        for (int j = 0; j < rank; ++j) value += model.eigenvectors[r][j] * coeffs[j];
        out.sample(x, y, r) = value;
      }
    }
  }
  return out;
}

}  // namespace cec
