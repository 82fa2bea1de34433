#pragma once

#include <charconv>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cec/error.hpp"
#include "cec/io.hpp"
#include "cec/pipeline.hpp"
#include "cec/seg.hpp"

namespace cec {

inline std::optional<FusionRule> parse_fusion_rule(std::string_view token) {
  if (token == "max") return FusionRule::max;
  if (token == "mean") return FusionRule::mean;
  return std::nullopt;
}

inline std::optional<StageSelect> parse_stage_select(std::string_view token) {
  if (token == "cec") return StageSelect::cec_only;
  if (token == "pca") return StageSelect::pca_only;
  if (token == "fused") return StageSelect::fused;
  return std::nullopt;
}

// Values read from a config file; unset fields fall back to built-in
// defaults and are in turn overridden by command-line flags.
struct ConfigValues {
  std::optional<double> high_frac;
  std::optional<double> low_frac;
  std::optional<double> sigma;
  std::optional<double> sobel_threshold_frac;
  std::optional<FusionRule> fusion_rule;
  std::optional<StageSelect> stage_select;
  std::optional<int> pca_k;
  std::optional<int> tolerance_r;
};

namespace config_detail {

inline double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError::at_line("invalid number '" + std::string(token) + "'", line);
  }
  return value;
}

inline int parse_nonneg_int(std::string_view token, std::size_t line) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value < 0) {
    throw ParseError::at_line("invalid non-negative integer '" + std::string(token) + "'", line);
  }
  return value;
}

}  // namespace config_detail

// Flat "key = value" lines; '#' starts a comment; unknown keys are errors.
inline ConfigValues parse_config_text(std::string_view text) {
  ConfigValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view raw = text.substr(pos, end == std::string_view::npos ? end : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const std::size_t hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    const std::string_view line = seg_detail::trim(raw);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError::at_line("expected 'key = value'", line_no);
    }
    const std::string_view key = seg_detail::trim(line.substr(0, eq));
    const std::string_view value = seg_detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError::at_line("expected 'key = value'", line_no);
    }

    if (key == "high_frac") {
      out.high_frac = config_detail::parse_double(value, line_no);
    } else if (key == "low_frac") {
      out.low_frac = config_detail::parse_double(value, line_no);
    } else if (key == "sigma") {
      out.sigma = config_detail::parse_double(value, line_no);
    } else if (key == "sobel_threshold_frac") {
      out.sobel_threshold_frac = config_detail::parse_double(value, line_no);
    } else if (key == "fusion_rule") {
      const auto rule = parse_fusion_rule(value);
      if (!rule) {
        throw ParseError::at_line("fusion_rule must be 'max' or 'mean'", line_no);
      }
      out.fusion_rule = *rule;
    } else if (key == "stage_select") {
      const auto stage = parse_stage_select(value);
      if (!stage) {
        throw ParseError::at_line("stage_select must be 'cec', 'pca' or 'fused'", line_no);
      }
      out.stage_select = *stage;
    } else if (key == "pca_k") {
      out.pca_k = config_detail::parse_nonneg_int(value, line_no);
    } else if (key == "tolerance_r") {
      out.tolerance_r = config_detail::parse_nonneg_int(value, line_no);
    } else {
      throw ParseError::at_line("unknown key '" + std::string(key) + "'", line_no);
    }
  }
  return out;
}

inline ConfigValues load_config_file(const std::filesystem::path& path) {
  return parse_config_text(read_file(path));
}

}  // namespace cec
