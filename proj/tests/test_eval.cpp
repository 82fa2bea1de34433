#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cec/eval.hpp"
#include "cec/io.hpp"
#include "cec/pnm.hpp"
#include "support/oracles.hpp"

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("cec_test_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

cec::BinaryMask column_mask(int w, int h, int col) {
  cec::BinaryMask m(w, h, 0);
  for (int y = 0; y < h; ++y) m(col, y) = 1;
  return m;
}

bool counts_equal(const cec::ConfusionCounts& a, const cec::ConfusionCounts& b) {
  return a.tp == b.tp && a.tn == b.tn && a.fp == b.fp && a.fn == b.fn;
}

}  // namespace

TEST_CASE("chebyshev dilation grows squares and clamps at borders", "[eval]") {
  cec::BinaryMask m(5, 5, 0);
  m(2, 2) = 1;
  REQUIRE(cec::dilate_chebyshev(m, 0) == m);

  const cec::BinaryMask d1 = cec::dilate_chebyshev(m, 1);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      const bool in_block = x >= 1 && x <= 3 && y >= 1 && y <= 3;
      REQUIRE(static_cast<bool>(d1(x, y)) == in_block);
    }
  }

  cec::BinaryMask corner(3, 3, 0);
  corner(0, 0) = 1;
  const cec::BinaryMask dc = cec::dilate_chebyshev(corner, 2);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) REQUIRE(dc(x, y) == 1);
  }
}

TEST_CASE("confusion on identical masks has no errors", "[eval]") {
  std::mt19937_64 rng(801);
  const cec::BinaryMask m = oracle::random_mask(rng, 9, 7, 0.3);
  for (int r : {0, 1, 2}) {
    const cec::ConfusionCounts c = cec::confusion(m, m, r);
    REQUIRE(c.fp == 0);
    REQUIRE(c.fn == 0);
    REQUIRE(c.tp + c.tn == m.size());
    REQUIRE(*cec::metrics(c).accuracy == 1.0);
  }
}

TEST_CASE("tolerance forgives a one-pixel shift", "[eval]") {
  const cec::BinaryMask gt = column_mask(5, 5, 2);
  const cec::BinaryMask pred = column_mask(5, 5, 3);

  const cec::ConfusionCounts strict = cec::confusion(pred, gt, 0);
  REQUIRE(strict.tp == 0);
  REQUIRE(strict.fp == 5);
  REQUIRE(strict.fn == 5);
  REQUIRE(strict.tn == 15);

  const cec::ConfusionCounts loose = cec::confusion(pred, gt, 1);
  REQUIRE(loose.tp == 5);
  REQUIRE(loose.fp == 0);
  REQUIRE(loose.fn == 0);
  REQUIRE(loose.tn == 20);
}

TEST_CASE("empty masks score perfect background", "[eval]") {
  const cec::BinaryMask empty(6, 4, 0);
  const cec::ConfusionCounts c = cec::confusion(empty, empty, 1);
  REQUIRE(c.tn == empty.size());
  const cec::Metrics m = cec::metrics(c);
  REQUIRE(*m.accuracy == 1.0);
  REQUIRE(*m.specificity == 1.0);
  REQUIRE_FALSE(m.precision.has_value());
  REQUIRE_FALSE(m.recall.has_value());
  REQUIRE_FALSE(m.f1.has_value());
}

TEST_CASE("metrics match their closed-form definitions", "[eval]") {
  cec::ConfusionCounts c;
  c.tp = 8;
  c.tn = 80;
  c.fp = 2;
  c.fn = 10;
  const cec::Metrics m = cec::metrics(c);
  REQUIRE(*m.accuracy == Catch::Approx(0.88).margin(1e-15));
  REQUIRE(*m.specificity == Catch::Approx(80.0 / 82.0).margin(1e-15));
  REQUIRE(*m.precision == Catch::Approx(0.8).margin(1e-15));
  REQUIRE(*m.recall == Catch::Approx(8.0 / 18.0).margin(1e-15));
  REQUIRE(*m.f1 == Catch::Approx(16.0 / 28.0).margin(1e-15));
}

TEST_CASE("precision is undefined without positive predictions", "[eval]") {
  cec::BinaryMask pred(4, 4, 0);
  cec::BinaryMask gt(4, 4, 0);
  gt(1, 1) = 1;
  const cec::Metrics m = cec::metrics(cec::confusion(pred, gt, 0));
  REQUIRE_FALSE(m.precision.has_value());
  REQUIRE(*m.recall == 0.0);
  REQUIRE(*m.accuracy == Catch::Approx(15.0 / 16.0).margin(1e-15));
}

TEST_CASE("confusion rejects bad arguments", "[eval]") {
  cec::BinaryMask a(3, 3, 0);
  cec::BinaryMask b(3, 4, 0);
  REQUIRE_THROWS_AS(cec::confusion(a, b, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(cec::confusion(a, a, -1), std::invalid_argument);
}

TEST_CASE("confusion matches the window-scan oracle", "[eval]") {
  std::mt19937_64 rng(802);
  for (int t = 0; t < 200; ++t) {
    const int w = 3 + oracle::uniform_int(rng, 0, 9);
    const int h = 3 + oracle::uniform_int(rng, 0, 9);
    const cec::BinaryMask pred = oracle::random_mask(rng, w, h, 0.25);
    const cec::BinaryMask gt = oracle::random_mask(rng, w, h, 0.25);
    for (int r : {0, 1, 2}) {
      const cec::ConfusionCounts got = cec::confusion(pred, gt, r);
      const cec::ConfusionCounts want = oracle::confusion_naive(pred, gt, r);
      REQUIRE(counts_equal(got, want));
      REQUIRE(got.tp + got.tn + got.fp + got.fn == pred.size());
      REQUIRE(got.tp + got.fp == static_cast<std::uint64_t>(
                                     std::count_if(pred.begin(), pred.end(),
                                                   [](auto v) { return v != 0; })));
    }
  }
}

TEST_CASE("growing the tolerance never hurts", "[eval]") {
  std::mt19937_64 rng(803);
  for (int t = 0; t < 50; ++t) {
    const cec::BinaryMask pred = oracle::random_mask(rng, 12, 12, 0.2);
    const cec::BinaryMask gt = oracle::random_mask(rng, 12, 12, 0.2);
    cec::ConfusionCounts prev = cec::confusion(pred, gt, 0);
    for (int r = 1; r <= 3; ++r) {
      const cec::ConfusionCounts cur = cec::confusion(pred, gt, r);
      REQUIRE(cur.tp >= prev.tp);
      REQUIRE(cur.fp <= prev.fp);
      REQUIRE(cur.fn <= prev.fn);
      prev = cur;
    }
  }
}

TEST_CASE("pair evaluation aggregates micro counts", "[eval]") {
  std::mt19937_64 rng(804);
  const cec::BinaryMask pred = oracle::random_mask(rng, 8, 8, 0.3);
  const cec::BinaryMask gt = oracle::random_mask(rng, 8, 8, 0.3);

  const cec::EvalReport single = cec::evaluate_pairs({{"one", pred, gt}}, 1);
  REQUIRE(single.all_ok);
  REQUIRE(single.rows.size() == 1);
  REQUIRE(counts_equal(single.rows[0].counts, single.aggregate.counts));

  const cec::EvalReport twice = cec::evaluate_pairs({{"a", pred, gt}, {"b", pred, gt}}, 1);
  REQUIRE(twice.aggregate.counts.tp == 2 * single.rows[0].counts.tp);
  REQUIRE(twice.aggregate.counts.fn == 2 * single.rows[0].counts.fn);
  REQUIRE(twice.aggregate.name == "aggregate");
}

TEST_CASE("manifest evaluation reads masks and isolates failures", "[eval]") {
  TempDir dir("eval_manifest");
  std::mt19937_64 rng(805);
  const cec::BinaryMask pred = oracle::random_mask(rng, 10, 6, 0.3);
  const cec::BinaryMask gt = oracle::random_mask(rng, 10, 6, 0.3);
  cec::write_file(dir.file("pred.pgm"), cec::encode_pgm(pred));
  cec::write_file(dir.file("gt.pgm"), cec::encode_pgm(gt));

  std::vector<cec::MaskPairPaths> entries{
      {"good", dir.file("pred.pgm"), dir.file("gt.pgm")},
      {"broken", dir.file("missing.pgm"), dir.file("gt.pgm")},
      {"good2", dir.file("pred.pgm"), dir.file("gt.pgm")},
  };
  const cec::EvalReport report = cec::evaluate_manifest(entries, 1);
  REQUIRE_FALSE(report.all_ok);
  REQUIRE(report.rows.size() == 3);
  REQUIRE(report.rows[0].ok);
  REQUIRE_FALSE(report.rows[1].ok);
  REQUIRE_FALSE(report.rows[1].error.empty());
  REQUIRE(report.rows[2].ok);

  const cec::ConfusionCounts direct = cec::confusion(pred, gt, 1);
  REQUIRE(counts_equal(report.rows[0].counts, direct));
  REQUIRE(report.aggregate.counts.tp == 2 * direct.tp);
  REQUIRE(report.aggregate.counts.tn == 2 * direct.tn);

  const cec::EvalReport parallel = cec::evaluate_manifest(entries, 1, 4);
  REQUIRE(parallel.rows.size() == report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    REQUIRE(parallel.rows[i].name == report.rows[i].name);
    REQUIRE(parallel.rows[i].ok == report.rows[i].ok);
    if (report.rows[i].ok) REQUIRE(counts_equal(parallel.rows[i].counts, report.rows[i].counts));
  }
}

TEST_CASE("size mismatches become row errors, not crashes", "[eval]") {
  TempDir dir("eval_mismatch");
  cec::write_file(dir.file("pred.pgm"), cec::encode_pgm(cec::BinaryMask(4, 4, 0)));
  cec::write_file(dir.file("gt.pgm"), cec::encode_pgm(cec::BinaryMask(5, 4, 0)));
  const cec::EvalReport report = cec::evaluate_manifest(
      {{"pair", dir.file("pred.pgm"), dir.file("gt.pgm")}}, 0);
  REQUIRE_FALSE(report.all_ok);
  REQUIRE_FALSE(report.rows[0].ok);
  REQUIRE(report.rows[0].error.find("size mismatch") != std::string::npos);
}

TEST_CASE("quoted reference figures are preserved verbatim", "[eval]") {
  const auto& rows = cec::reference_comparison_rows();
  REQUIRE(rows.size() == 6);
  REQUIRE(std::string(rows[0].method) == "Sobel");
  REQUIRE(rows[0].accuracy_percent == 87.8);
  REQUIRE(rows[0].specificity_percent == 95.8);
  REQUIRE(std::string(rows[5].method) == "CEC");
  REQUIRE(rows[5].accuracy_percent == 99.0);
  REQUIRE(rows[5].specificity_percent == 98.0);

  const cec::EvalRow cecrow = cec::reference_row(rows[5]);
  REQUIRE(cecrow.name == "CEC (quoted from paper)");
  REQUIRE(cecrow.reference);
  REQUIRE(*cecrow.scores.accuracy == Catch::Approx(0.99).margin(1e-15));
  REQUIRE(*cecrow.scores.specificity == Catch::Approx(0.98).margin(1e-15));
  REQUIRE_FALSE(cecrow.scores.precision.has_value());
}

TEST_CASE("csv report has a fixed header and blank undefined fields", "[eval]") {
  cec::BinaryMask pred(4, 4, 0);
  cec::BinaryMask gt(4, 4, 0);
  gt(0, 0) = 1;
  cec::EvalReport report = cec::evaluate_pairs({{"plain", pred, gt}}, 0);
  report.rows.push_back([] {
    cec::EvalRow row;
    row.name = "broken,name";
    row.ok = false;
    row.error = "boom";
    return row;
  }());
  report.all_ok = false;

  const std::string csv = cec::report_csv(report, {cec::reference_row({"CEC", 99.0, 98.0})});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == cec::kReportCsvHeader);
  std::getline(in, line);
  // tp=0, fp=0: precision is undefined and stays empty
  REQUIRE(line == "plain,0,15,0,1,0.9375,1,,0,0");
  std::getline(in, line);
  REQUIRE(line == "\"broken,name\",,,,,,,,,");
  std::getline(in, line);
  REQUIRE(line.substr(0, 10) == "aggregate,");
  std::getline(in, line);
  REQUIRE(line == "CEC (quoted from paper),,,,,0.99,0.98,,,");
}

TEST_CASE("jsonl report uses nulls and error keys", "[eval]") {
  cec::BinaryMask pred(3, 3, 0);
  cec::BinaryMask gt(3, 3, 0);
  cec::EvalReport report = cec::evaluate_pairs({{"empty", pred, gt}}, 0);
  cec::EvalRow bad;
  bad.name = "lost";
  bad.ok = false;
  bad.error = "cannot open";
  report.rows.push_back(bad);

  const std::string jsonl = cec::report_jsonl(report);
  std::istringstream in(jsonl);
  std::string line;

  std::getline(in, line);
  const nlohmann::json first = nlohmann::json::parse(line);
  REQUIRE(first["name"] == "empty");
  REQUIRE(first["tn"] == 9);
  REQUIRE(first["accuracy"] == 1.0);
  REQUIRE(first["recall"].is_null());
  REQUIRE_FALSE(first.contains("error"));

  std::getline(in, line);
  const nlohmann::json second = nlohmann::json::parse(line);
  REQUIRE(second["name"] == "lost");
  REQUIRE(second["error"] == "cannot open");
  REQUIRE_FALSE(second.contains("tp"));

  std::getline(in, line);
  REQUIRE(nlohmann::json::parse(line)["name"] == "aggregate");
}
