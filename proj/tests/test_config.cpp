#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>

#include "cec/config.hpp"
#include "cec/error.hpp"
#include "cec/io.hpp"

namespace {

std::string config_failure(const std::string& text) {
  try {
    cec::parse_config_text(text);
  } catch (const cec::ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("enum token helpers accept exactly the documented spellings", "[config]") {
  REQUIRE(cec::parse_fusion_rule("max") == cec::FusionRule::max);
  REQUIRE(cec::parse_fusion_rule("mean") == cec::FusionRule::mean);
  REQUIRE_FALSE(cec::parse_fusion_rule("MAX").has_value());
  REQUIRE_FALSE(cec::parse_fusion_rule("").has_value());

  REQUIRE(cec::parse_stage_select("cec") == cec::StageSelect::cec_only);
  REQUIRE(cec::parse_stage_select("pca") == cec::StageSelect::pca_only);
  REQUIRE(cec::parse_stage_select("fused") == cec::StageSelect::fused);
  REQUIRE_FALSE(cec::parse_stage_select("both").has_value());
}

TEST_CASE("every key parses and lands in the right field", "[config]") {
  const cec::ConfigValues v = cec::parse_config_text(
      "high_frac = 0.25\n"
      "low_frac = 0.1\n"
      "sigma = 1.5\n"
      "sobel_threshold_frac = 0.3\n"
      "fusion_rule = mean\n"
      "stage_select = pca\n"
      "pca_k = 2\n"
      "tolerance_r = 1\n");
  REQUIRE(v.high_frac == 0.25);
  REQUIRE(v.low_frac == 0.1);
  REQUIRE(v.sigma == 1.5);
  REQUIRE(v.sobel_threshold_frac == 0.3);
  REQUIRE(v.fusion_rule == cec::FusionRule::mean);
  REQUIRE(v.stage_select == cec::StageSelect::pca_only);
  REQUIRE(v.pca_k == 2);
  REQUIRE(v.tolerance_r == 1);
}

TEST_CASE("unset keys stay empty", "[config]") {
  const cec::ConfigValues v = cec::parse_config_text("sigma = 2.0\n");
  REQUIRE(v.sigma == 2.0);
  REQUIRE_FALSE(v.high_frac.has_value());
  REQUIRE_FALSE(v.low_frac.has_value());
  REQUIRE_FALSE(v.fusion_rule.has_value());
  REQUIRE_FALSE(v.stage_select.has_value());
  REQUIRE_FALSE(v.pca_k.has_value());
  REQUIRE_FALSE(v.tolerance_r.has_value());

  const cec::ConfigValues empty = cec::parse_config_text("");
  REQUIRE_FALSE(empty.sigma.has_value());
}

TEST_CASE("comments and stray whitespace are ignored", "[config]") {
  const cec::ConfigValues v = cec::parse_config_text(
      "# pipeline tuning\n"
      "\n"
      "  high_frac =   0.5   # inline note\n"
      "\t low_frac\t=\t0.2\n");
  REQUIRE(v.high_frac == 0.5);
  REQUIRE(v.low_frac == 0.2);
}

TEST_CASE("malformed lines raise parse errors with line numbers", "[config]") {
  REQUIRE(config_failure("wat = 1\n") == "unknown key 'wat', line 1");
  REQUIRE(config_failure("sigma 1.0\n").find("expected 'key = value'") != std::string::npos);
  REQUIRE(config_failure("sigma =\n").find("expected 'key = value'") != std::string::npos);
  REQUIRE(config_failure("= 1.0\n").find("expected 'key = value'") != std::string::npos);
  REQUIRE(config_failure("sigma = abc\n").find("invalid number 'abc'") != std::string::npos);
  REQUIRE(config_failure("pca_k = -1\n").find("invalid non-negative integer") !=
          std::string::npos);
  REQUIRE(config_failure("pca_k = 1.5\n").find("invalid non-negative integer") !=
          std::string::npos);
  REQUIRE(config_failure("fusion_rule = add\n").find("fusion_rule must be 'max' or 'mean'") !=
          std::string::npos);
  REQUIRE(config_failure("stage_select = all\n")
              .find("stage_select must be 'cec', 'pca' or 'fused'") != std::string::npos);
  REQUIRE(config_failure("high_frac = 0.5\nsigma = ?\n").find("line 2") != std::string::npos);
}

TEST_CASE("config files load through the same parser", "[config]") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "cec_test_config";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  cec::write_file(dir / "tune.conf", "high_frac = 0.4\nlow_frac = 0.1\n");
  const cec::ConfigValues v = cec::load_config_file(dir / "tune.conf");
  REQUIRE(v.high_frac == 0.4);
  REQUIRE(v.low_frac == 0.1);

  REQUIRE_THROWS_AS(cec::load_config_file(dir / "absent.conf"), cec::IoError);

  std::filesystem::remove_all(dir);
}
