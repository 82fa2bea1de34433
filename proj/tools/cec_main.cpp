#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cec/cec.hpp"

namespace {

// Bad flag combinations and config-file problems; rendered as exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Detector { cec, sobel, canny };

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Raw flag storage plus option handles so "was this flag given" is checkable
// after parsing; config-file values only apply to flags left unset.
struct Options {
  std::string config_path;
  double high = 0.0;
  double low = 0.0;
  double sigma = 0.0;
  std::string fusion;
  std::string stage;
  std::string detector = "cec";
  int pca_k = 1;
  double sobel_threshold = 0.0;
  int tolerance = 0;
  std::string format = "csv";
  std::string out_path;
  int jobs = default_jobs();
  bool emit_intermediates = false;
  bool reference = false;
  bool detect_first = false;

  CLI::Option* high_opt = nullptr;
  CLI::Option* low_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* fusion_opt = nullptr;
  CLI::Option* stage_opt = nullptr;
  CLI::Option* pca_k_opt = nullptr;
  CLI::Option* sobel_opt = nullptr;
  CLI::Option* tolerance_opt = nullptr;
};

void add_detect_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", o.config_path, "Config file (flat 'key = value' lines)");
  o.high_opt = cmd.add_option("--high", o.high, "High hysteresis threshold, fraction of map max");
  o.low_opt = cmd.add_option("--low", o.low, "Low hysteresis threshold, fraction of map max");
  o.sigma_opt = cmd.add_option("--sigma", o.sigma, "Gaussian smoothing sigma (0 disables)");
  o.fusion_opt = cmd.add_option("--fusion", o.fusion, "Fusion rule: max|mean");
  o.stage_opt = cmd.add_option("--stage", o.stage, "Stage selection: cec|pca|fused");
  cmd.add_option("--detector", o.detector, "Detector: cec|sobel|canny");
  o.pca_k_opt = cmd.add_option("--pca-k", o.pca_k, "Principal components kept (1..3)");
  o.sobel_opt = cmd.add_option("--sobel-threshold", o.sobel_threshold,
                               "Sobel binarization threshold, fraction of map max");
}

struct Settings {
  Detector detector = Detector::cec;
  cec::PipelineConfig pipeline;
  double sobel_threshold = cec::kDefaultSobelThresholdFrac;
  int tolerance = 0;
  int jobs = 1;
};

Settings resolve_settings(const Options& o) {
  Settings s;
  if (o.detector == "cec") {
    s.detector = Detector::cec;
  } else if (o.detector == "sobel") {
    s.detector = Detector::sobel;
  } else if (o.detector == "canny") {
    s.detector = Detector::canny;
  } else {
    throw UsageError("--detector must be cec, sobel or canny");
  }
  if (s.detector == Detector::canny) {
    s.pipeline.hysteresis = cec::classic_canny_defaults();
  }

  std::string config_path = o.config_path;
  if (config_path.empty()) {
    if (const char* env = std::getenv("CEC_CONFIG")) config_path = env;
  }
  if (!config_path.empty()) {
    cec::ConfigValues file;
    try {
      file = cec::load_config_file(config_path);
    } catch (const std::exception& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
    if (file.high_frac) s.pipeline.hysteresis.high_frac = *file.high_frac;
    if (file.low_frac) s.pipeline.hysteresis.low_frac = *file.low_frac;
    if (file.sigma) s.pipeline.hysteresis.sigma = *file.sigma;
    if (file.fusion_rule) s.pipeline.fusion_rule = *file.fusion_rule;
    if (file.stage_select) s.pipeline.stage_select = *file.stage_select;
    if (file.pca_k) s.pipeline.pca_rank = *file.pca_k;
    if (file.sobel_threshold_frac) s.sobel_threshold = *file.sobel_threshold_frac;
    if (file.tolerance_r) s.tolerance = *file.tolerance_r;
  }

  if (o.high_opt && o.high_opt->count() > 0) s.pipeline.hysteresis.high_frac = o.high;
  if (o.low_opt && o.low_opt->count() > 0) s.pipeline.hysteresis.low_frac = o.low;
  if (o.sigma_opt && o.sigma_opt->count() > 0) s.pipeline.hysteresis.sigma = o.sigma;
  if (o.fusion_opt && o.fusion_opt->count() > 0) {
    const auto rule = cec::parse_fusion_rule(o.fusion);
    if (!rule) throw UsageError("--fusion must be max or mean");
    s.pipeline.fusion_rule = *rule;
  }
  if (o.stage_opt && o.stage_opt->count() > 0) {
    const auto stage = cec::parse_stage_select(o.stage);
    if (!stage) throw UsageError("--stage must be cec, pca or fused");
    s.pipeline.stage_select = *stage;
  }
  if (o.pca_k_opt && o.pca_k_opt->count() > 0) s.pipeline.pca_rank = o.pca_k;
  if (o.sobel_opt && o.sobel_opt->count() > 0) s.sobel_threshold = o.sobel_threshold;
  if (o.tolerance_opt && o.tolerance_opt->count() > 0) s.tolerance = o.tolerance;
  s.jobs = o.jobs;

  try {
    cec::validate(s.pipeline.hysteresis);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (s.pipeline.pca_rank < 1 || s.pipeline.pca_rank > 3) {
    throw UsageError("pca_k must be between 1 and 3");
  }
  if (!(s.sobel_threshold > 0.0 && s.sobel_threshold <= 1.0)) {
    throw UsageError("sobel threshold fraction must be in (0, 1]");
  }
  if (s.tolerance < 0) throw UsageError("--tolerance must be non-negative");
  if (s.jobs < 1) throw UsageError("--jobs must be at least 1");
  return s;
}

cec::RasterImage load_image(const std::string& path) {
  return cec::decode_pnm(cec::read_file(path));
}

cec::BinaryMask detect_mask(const cec::RasterImage& img, const Settings& s) {
  switch (s.detector) {
    case Detector::sobel:
      return cec::sobel_edges(img, s.sobel_threshold).mask;
    case Detector::canny:
      return cec::classic_canny(img, s.pipeline.hysteresis).mask;
    case Detector::cec:
      break;
  }
  return cec::run_pipeline(img, s.pipeline).edges.mask;
}

int cmd_detect(const Options& o, const std::string& input, const std::string& output) {
  const Settings s = resolve_settings(o);
  const cec::RasterImage img = load_image(input);
  if (s.detector == Detector::cec) {
    const cec::PipelineResult r = cec::run_pipeline(img, s.pipeline);
    if (o.emit_intermediates) {
      const std::string stem = std::filesystem::path(output).replace_extension().string();
      cec::write_file_atomic(stem + ".cec.pgm",
                             cec::encode_pgm(r.cec_magnitude, cec::PgmScale::linear));
      cec::write_file_atomic(stem + ".pca.pgm",
                             cec::encode_pgm(r.pca_magnitude, cec::PgmScale::linear));
      cec::write_file_atomic(stem + ".fused.pgm", cec::encode_pgm(r.fused, cec::PgmScale::linear));
      cec::write_file_atomic(stem + ".nms.pgm", cec::encode_pgm(r.post_nms, cec::PgmScale::linear));
    }
    cec::write_file_atomic(output, cec::encode_pgm(r.edges.mask));
  } else {
    if (o.emit_intermediates) {
      std::cerr << "cec: warning: --emit-intermediates only applies to the cec detector\n";
    }
    cec::write_file_atomic(output, cec::encode_pgm(detect_mask(img, s)));
  }
  return 0;
}

int cmd_batch(const Options& o, const std::string& manifest_path, const std::string& out_dir) {
  const Settings s = resolve_settings(o);
  const std::vector<cec::ManifestEntry> entries = cec::load_manifest(manifest_path);
  if (entries.empty()) {
    std::cerr << "cec: warning: empty manifest, nothing to do\n";
    return 0;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw cec::IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  }

  struct Item {
    std::string out;
    std::string error;
    bool ok = false;
  };
  std::vector<Item> items(entries.size());
  cec::parallel_for_indexed(entries.size(), s.jobs, [&](std::size_t i) {
    Item& item = items[i];
    const std::string stem = std::filesystem::path(entries[i].image_path).stem().string();
    item.out = (std::filesystem::path(out_dir) / (stem + ".edges.pgm")).string();
    try {
      const cec::RasterImage img = load_image(entries[i].image_path);
      cec::write_file_atomic(item.out, cec::encode_pgm(detect_mask(img, s)));
      item.ok = true;
    } catch (const std::exception& e) {
      item.error = e.what();
    }
  });

  bool all_ok = true;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].ok) {
      std::cerr << "cec: ok: " << entries[i].image_path << " -> " << items[i].out << "\n";
    } else {
      std::cerr << "cec: error: " << entries[i].image_path << ": " << items[i].error << "\n";
      all_ok = false;
    }
  }
  return all_ok ? 0 : 4;
}

int cmd_eval(const Options& o, const std::string& manifest_path) {
  const Settings s = resolve_settings(o);
  if (o.format != "csv" && o.format != "json") {
    throw UsageError("--format must be csv or json");
  }
  const std::vector<cec::ManifestEntry> entries = cec::load_manifest(manifest_path);
  if (entries.empty()) {
    std::cerr << "cec: warning: empty manifest, nothing to evaluate\n";
  }

  std::vector<std::string> names;
  names.reserve(entries.size());
  for (const cec::ManifestEntry& e : entries) {
    names.push_back(std::filesystem::path(e.image_path).filename().string());
  }
  const cec::EvalReport report =
      cec::evaluate_indexed(names, s.tolerance, s.jobs, [&](std::size_t i) {
        const cec::ManifestEntry& e = entries[i];
        if (e.gt_path.empty()) {
          throw std::invalid_argument("manifest line lacks a ground-truth path");
        }
        cec::BinaryMask pred = o.detect_first ? detect_mask(load_image(e.image_path), s)
                                              : cec::mask_from_image(load_image(e.image_path));
        cec::BinaryMask gt = cec::mask_from_image(load_image(e.gt_path));
        return std::pair{std::move(pred), std::move(gt)};
      });

  std::vector<cec::EvalRow> extra;
  if (o.reference) {
    for (const cec::ReferenceRow& r : cec::reference_comparison_rows()) {
      extra.push_back(cec::reference_row(r));
    }
  }
  const std::string text =
      o.format == "json" ? cec::report_jsonl(report, extra) : cec::report_csv(report, extra);
  if (o.out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    cec::write_file_atomic(o.out_path, text);
  }
  return report.all_ok ? 0 : 4;
}

int cmd_convert_seg(const std::string& seg_path, const std::string& output) {
  const cec::LabelGrid grid = cec::parse_seg(cec::read_file(seg_path));
  cec::write_file_atomic(output, cec::encode_pgm(cec::boundary_mask(grid)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Color edge detection: quaternion-rotation filtering cascaded with "
      "PCA-enhanced gradients, plus baselines and an evaluation harness"};
  app.require_subcommand(1);

  Options detect_opts;
  std::string detect_input;
  std::string detect_output;
  CLI::App* detect = app.add_subcommand("detect", "Detect edges in one PNM image");
  detect->add_option("input", detect_input, "Input image (PGM/PPM)")->required();
  detect->add_option("output", detect_output, "Output edge map (binary PGM)")->required();
  add_detect_flags(*detect, detect_opts);
  detect->add_flag("--emit-intermediates", detect_opts.emit_intermediates,
                   "Also write per-stage magnitude maps (.cec/.pca/.fused/.nms.pgm)");

  Options batch_opts;
  std::string batch_manifest;
  std::string batch_out_dir;
  CLI::App* batch = app.add_subcommand("batch", "Detect edges for every image in a manifest");
  batch->add_option("manifest", batch_manifest, "Manifest: one image path per line")->required();
  batch->add_option("out_dir", batch_out_dir, "Directory for <stem>.edges.pgm outputs")
      ->required();
  add_detect_flags(*batch, batch_opts);
  batch->add_option("--jobs", batch_opts.jobs, "Concurrent workers (default: processor count)");

  Options eval_opts;
  std::string eval_manifest;
  CLI::App* eval = app.add_subcommand("eval", "Score predictions against ground-truth masks");
  eval->add_option("manifest", eval_manifest, "Manifest: prediction<TAB>ground-truth per line")
      ->required();
  add_detect_flags(*eval, eval_opts);
  eval_opts.tolerance_opt =
      eval->add_option("--tolerance", eval_opts.tolerance, "Match tolerance radius in pixels");
  eval->add_option("--format", eval_opts.format, "Report format: csv|json");
  eval->add_option("--out", eval_opts.out_path, "Write the report here instead of stdout");
  eval->add_option("--jobs", eval_opts.jobs, "Concurrent workers (default: processor count)");
  eval->add_flag("--reference", eval_opts.reference,
                 "Append the published comparison rows (quoted from paper)");
  eval->add_flag("--detect-first", eval_opts.detect_first,
                 "Treat the first column as an input image and run the detector on it");

  std::string seg_input;
  std::string seg_output;
  CLI::App* convert = app.add_subcommand("convert-seg",
                                         "Convert segmentation ground truth to a boundary PGM");
  convert->add_option("seg", seg_input, "Segmentation ground-truth (.seg) file")->required();
  convert->add_option("output", seg_output, "Output boundary mask (binary PGM)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "cec: usage: " << e.what() << "\n";
    return 1;
  }

  try {
    if (detect->parsed()) return cmd_detect(detect_opts, detect_input, detect_output);
    if (batch->parsed()) return cmd_batch(batch_opts, batch_manifest, batch_out_dir);
    if (eval->parsed()) return cmd_eval(eval_opts, eval_manifest);
    if (convert->parsed()) return cmd_convert_seg(seg_input, seg_output);
  } catch (const UsageError& e) {
    std::cerr << "cec: usage: " << e.what() << "\n";
    return 1;
  } catch (const cec::IoError& e) {
    std::cerr << "cec: io: " << e.what() << "\n";
    return 2;
  } catch (const cec::ParseError& e) {
    std::cerr << "cec: parse: " << e.what() << "\n";
    return 2;
  } catch (const cec::NumericError& e) {
    std::cerr << "cec: numeric: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "cec: data: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "cec: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
