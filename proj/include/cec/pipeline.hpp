#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cec/canny.hpp"
#include "cec/filter.hpp"
#include "cec/image.hpp"
#include "cec/pca.hpp"
#include "cec/quaternion.hpp"

namespace cec {

enum class FusionRule { max, mean };
enum class StageSelect { cec_only, pca_only, fused };

struct PipelineConfig {
  HysteresisParams hysteresis;  // sigma defaults to 0: the masks already average
  FusionRule fusion_rule = FusionRule::max;
  int pca_rank = 1;
  StageSelect stage_select = StageSelect::fused;
};

// Everything the cascade produces, kept so every stage can be exported.
struct PipelineResult {
  EdgeMap edges;
  MagnitudeMap cec_magnitude;  // combined quaternion-mask modulus (raw scale)
  MagnitudeMap pca_magnitude;  // gradient magnitude of the enhanced channel (raw scale)
  MagnitudeMap fused;          // normalized map fed to NMS (after stage selection)
  MagnitudeMap post_nms;
  GrayImage direction;         // gradient direction from the enhanced channel
};

// Divides by the maximum entry; an all-zero map is returned unchanged.
inline MagnitudeMap normalize_map(MagnitudeMap m) {
  double mmax = 0.0;
  for (double v : m) mmax = std::max(mmax, v);
  if (mmax == 0.0) return m;
  for (double& v : m) v /= mmax;
  return m;
}

inline MagnitudeMap fuse(const MagnitudeMap& a, const MagnitudeMap& b, FusionRule rule) {
  if (!a.same_size(b)) {
    throw std::invalid_argument("fuse requires equally sized maps");
  }
  MagnitudeMap out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double av = a.cells()[i];
    const double bv = b.cells()[i];
    out.cells()[i] = rule == FusionRule::max ? std::max(av, bv) : 0.5 * (av + bv);
  }
  return out;
}

// Full cascade: quaternion-mask modulus and PCA-enhanced gradient magnitude
// run in parallel, their normalized maps are fused (or one is selected), and
// NMS plus hysteresis produce the edge map. NMS directions come from the
// gradient stage since the modulus carries no orientation.
inline PipelineResult run_pipeline(const RasterImage& img, const PipelineConfig& cfg) {
  if (img.channels() != 3) {
    throw std::invalid_argument("run_pipeline requires a 3-channel image");
  }
  if (img.width() < 3 || img.height() < 3) {
    throw std::invalid_argument("run_pipeline requires at least a 3x3 image");
  }
  validate(cfg.hysteresis);
  if (cfg.pca_rank < 1 || cfg.pca_rank > 3) {
    throw std::invalid_argument("pca rank must be in 1..3");
  }

  const QuaternionImage qimg = to_quaternion_image(img);
  const MaskPair masks = build_masks(gray_axis_rotation());
  const ResponsePair resp = quaternion_convolve(qimg, masks);
  const auto [q1, q2] = modulus_maps(resp);
  MagnitudeMap m_cec = combined_modulus(q1, q2);

  const PcaModel model = fit_pca(img);
  const GrayImage channel = cfg.pca_rank == 1
                                ? pca_coefficient_channel(img, model)
                                : to_grayscale(pca_reconstruct(img, model, cfg.pca_rank));
  const GrayImage smoothed = gaussian_smooth(channel, cfg.hysteresis.sigma);
  GradientField grad = sobel_gradients(smoothed);

  MagnitudeMap selected;
  switch (cfg.stage_select) {
    case StageSelect::cec_only:
      selected = normalize_map(m_cec);
      break;
    case StageSelect::pca_only:
      selected = normalize_map(grad.magnitude);
      break;
    case StageSelect::fused:
      selected = fuse(normalize_map(m_cec), normalize_map(grad.magnitude), cfg.fusion_rule);
      break;
  }

  MagnitudeMap post_nms = non_max_suppress(selected, grad.direction);
  EdgeMap edges = hysteresis(post_nms, cfg.hysteresis);
  return PipelineResult{std::move(edges),    std::move(m_cec),
                        std::move(grad.magnitude), std::move(selected),
                        std::move(post_nms), std::move(grad.direction)};
}

}  // namespace cec
