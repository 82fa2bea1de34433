#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cec/error.hpp"
#include "cec/image.hpp"
#include "cec/io.hpp"
#include "cec/pnm.hpp"

namespace cec {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

// Ratios with a zero denominator stay unset rather than defaulting to 0 or 1.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

// Chebyshev (square window) dilation by `radius`, computed separably:
// 1-D max over rows, then over columns.
inline BinaryMask dilate_chebyshev(const BinaryMask& mask, int radius) {
  if (radius <= 0) return mask;
  BinaryMask rows(mask.width(), mask.height(), 0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      for (int d = -radius; d <= radius; ++d) {
        const int nx = x + d;
        if (nx >= 0 && nx < mask.width() && mask(nx, y)) {
          rows(x, y) = 1;
          break;
        }
      }
    }
  }
  BinaryMask out(mask.width(), mask.height(), 0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      for (int d = -radius; d <= radius; ++d) {
        const int ny = y + d;
        if (ny >= 0 && ny < mask.height() && rows(x, ny)) {
          out(x, y) = 1;
          break;
        }
      }
    }
  }
  return out;
}

// tolerance_r = 0 compares pixelwise. For r > 0 a prediction counts as a hit
// anywhere within Chebyshev distance r of ground truth, and a ground-truth
// pixel is missed only when no prediction lies within r of it.
inline ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt,
                                 int tolerance_r = 0) {
  if (!pred.same_size(gt)) {
    throw std::invalid_argument("confusion requires equally sized masks");
  }
  if (tolerance_r < 0) {
    throw std::invalid_argument("tolerance must be non-negative");
  }
  ConfusionCounts c;
  if (tolerance_r == 0) {
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const bool p = pred.cells()[i] != 0;
      const bool g = gt.cells()[i] != 0;
      if (p && g) ++c.tp;
      else if (p && !g) ++c.fp;
      else if (!p && g) ++c.fn;
      else ++c.tn;
    }
    return c;
  }
  const BinaryMask gt_near = dilate_chebyshev(gt, tolerance_r);
  const BinaryMask pred_near = dilate_chebyshev(pred, tolerance_r);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.cells()[i] != 0;
    if (p && gt_near.cells()[i]) ++c.tp;
    else if (p) ++c.fp;
    if (!p && gt.cells()[i] && !pred_near.cells()[i]) ++c.fn;
  }
  c.tn = pred.size() - c.tp - c.fp - c.fn;
  return c;
}

inline Metrics metrics(const ConfusionCounts& c) {
  Metrics m;
  const auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.specificity = ratio(c.tn, c.tn + c.fp);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  return m;
}

struct EvalRow {
  std::string name;
  bool ok = false;
  bool reference = false;  // quoted comparison row: only accuracy/specificity
  std::string error;
  ConfusionCounts counts;
  Metrics scores;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  EvalRow aggregate;  // micro-average over successful rows
  bool all_ok = true;
};

namespace eval_detail {

inline EvalRow make_row(const std::string& name, const ConfusionCounts& counts) {
  EvalRow row;
  row.name = name;
  row.ok = true;
  row.counts = counts;
  row.scores = metrics(counts);
  return row;
}

inline void finalize(EvalReport& report) {
  ConfusionCounts sum;
  report.all_ok = true;
  for (const EvalRow& row : report.rows) {
    if (row.ok) {
      sum += row.counts;
    } else {
      report.all_ok = false;
    }
  }
  report.aggregate = make_row("aggregate", sum);
}

}  // namespace eval_detail

// Runs fn(0..n-1) over at most `jobs` worker threads; jobs <= 1 runs inline.
// fn must not throw across the call boundary when jobs > 1.
inline void parallel_for_indexed(std::size_t n, int jobs,
                                 const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct NamedMaskPair {
  std::string name;
  BinaryMask pred;
  BinaryMask gt;
};

inline EvalReport evaluate_pairs(const std::vector<NamedMaskPair>& pairs, int tolerance_r) {
  EvalReport report;
  report.rows.reserve(pairs.size());
  for (const NamedMaskPair& p : pairs) {
    if (!p.pred.same_size(p.gt)) {
      EvalRow row;
      row.name = p.name;
      row.error = "size mismatch between prediction and ground truth";
      report.rows.push_back(std::move(row));
      continue;
    }
    report.rows.push_back(eval_detail::make_row(p.name, confusion(p.pred, p.gt, tolerance_r)));
  }
  eval_detail::finalize(report);
  return report;
}

// Scores one pair per name; load(i) supplies (prediction, ground truth) and
// may throw, turning that row into an error row while the aggregate covers
// the rest. Rows keep input order regardless of `jobs`.
inline EvalReport evaluate_indexed(
    const std::vector<std::string>& names, int tolerance_r, int jobs,
    const std::function<std::pair<BinaryMask, BinaryMask>(std::size_t)>& load) {
  EvalReport report;
  report.rows.resize(names.size());
  parallel_for_indexed(names.size(), jobs, [&](std::size_t i) {
    EvalRow row;
    row.name = names[i];
    try {
      const auto [pred, gt] = load(i);
      if (!pred.same_size(gt)) {
        throw std::invalid_argument("size mismatch between prediction and ground truth");
      }
      row = eval_detail::make_row(names[i], confusion(pred, gt, tolerance_r));
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
    }
    report.rows[i] = std::move(row);
  });
  eval_detail::finalize(report);
  return report;
}

struct MaskPairPaths {
  std::string name;
  std::string pred_path;
  std::string gt_path;
};

// Reads each (prediction, ground truth) mask pair from disk and scores it.
inline EvalReport evaluate_manifest(const std::vector<MaskPairPaths>& entries, int tolerance_r,
                                    int jobs = 1) {
  std::vector<std::string> names;
  names.reserve(entries.size());
  for (const MaskPairPaths& e : entries) names.push_back(e.name);
  return evaluate_indexed(names, tolerance_r, jobs, [&entries](std::size_t i) {
    return std::pair{mask_from_image(decode_pnm(read_file(entries[i].pred_path))),
                     mask_from_image(decode_pnm(read_file(entries[i].gt_path)))};
  });
}

// Published comparison figures, reproduced verbatim; values are percentages.
struct ReferenceRow {
  const char* method;
  double accuracy_percent;
  double specificity_percent;
};

inline const std::vector<ReferenceRow>& reference_comparison_rows() {
  static const std::vector<ReferenceRow> rows{
      {"Sobel", 87.8, 95.8}, {"ERRNet", 86.8, 97.8}, {"SASM", 94.0, 94.0},
      {"PiDiNet", 78.0, 86.0}, {"LCD", 88.0, 93.0},  {"CEC", 99.0, 98.0},
  };
  return rows;
}

inline EvalRow reference_row(const ReferenceRow& r) {
  EvalRow row;
  row.name = std::string(r.method) + " (quoted from paper)";
  row.ok = true;
  row.reference = true;
  row.scores.accuracy = r.accuracy_percent / 100.0;
  row.scores.specificity = r.specificity_percent / 100.0;
  return row;
}

namespace eval_detail {

inline std::string format_metric(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", *v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void append_csv_row(std::string& out, const EvalRow& row) {
  out += csv_escape(row.name);
  if (row.ok && !row.reference) {
    out += ',' + std::to_string(row.counts.tp) + ',' + std::to_string(row.counts.tn) + ',' +
           std::to_string(row.counts.fp) + ',' + std::to_string(row.counts.fn);
  } else {
    out += ",,,,";
  }
  if (row.ok) {
    out += ',' + format_metric(row.scores.accuracy) + ',' + format_metric(row.scores.specificity) +
           ',' + format_metric(row.scores.precision) + ',' + format_metric(row.scores.recall) +
           ',' + format_metric(row.scores.f1);
  } else {
    out += ",,,,,";
  }
  out += '\n';
}

inline nlohmann::json json_row(const EvalRow& row) {
  nlohmann::json j;
  j["name"] = row.name;
  if (!row.ok) {
    j["error"] = row.error;
    return j;
  }
  const auto put = [&j](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
  };
  if (row.reference) {
    j["tp"] = nullptr;
    j["tn"] = nullptr;
    j["fp"] = nullptr;
    j["fn"] = nullptr;
  } else {
    j["tp"] = row.counts.tp;
    j["tn"] = row.counts.tn;
    j["fp"] = row.counts.fp;
    j["fn"] = row.counts.fn;
  }
  put("accuracy", row.scores.accuracy);
  put("specificity", row.scores.specificity);
  put("precision", row.scores.precision);
  put("recall", row.scores.recall);
  put("f1", row.scores.f1);
  return j;
}

}  // namespace eval_detail

inline constexpr const char* kReportCsvHeader =
    "name,tp,tn,fp,fn,accuracy,specificity,precision,recall,f1";

// Rows in manifest order, then the aggregate, then any extra rows (used for
// the quoted reference figures). Undefined metrics render as empty fields.
inline std::string report_csv(const EvalReport& report,
                              const std::vector<EvalRow>& extra_rows = {}) {
  std::string out = kReportCsvHeader;
  out += '\n';
  for (const EvalRow& row : report.rows) eval_detail::append_csv_row(out, row);
  eval_detail::append_csv_row(out, report.aggregate);
  for (const EvalRow& row : extra_rows) eval_detail::append_csv_row(out, row);
  return out;
}

// JSON-lines rendering with the same keys as the CSV header; undefined
// metrics are null, failed rows carry an "error" key instead of counts.
inline std::string report_jsonl(const EvalReport& report,
                                const std::vector<EvalRow>& extra_rows = {}) {
  std::string out;
  for (const EvalRow& row : report.rows) out += eval_detail::json_row(row).dump() + '\n';
  out += eval_detail::json_row(report.aggregate).dump() + '\n';
  for (const EvalRow& row : extra_rows) out += eval_detail::json_row(row).dump() + '\n';
  return out;
}

}  // namespace cec
