#pragma once

#include <charconv>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cec/error.hpp"
#include "cec/image.hpp"
#include "cec/io.hpp"

namespace cec {

// Segmentation ground truth: every pixel carries one label < segment_count.
struct LabelGrid {
  Grid<int> labels;
  int segment_count = 0;

  int width() const { return labels.width(); }
  int height() const { return labels.height(); }
};

namespace seg_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline long parse_int(std::string_view token, const char* what, std::size_t line) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError::at_line(std::string("invalid ") + what + " '" + std::string(token) + "'",
                              line);
  }
  return value;
}

}  // namespace seg_detail

// Parses the ASCII segmentation format: "key value" header lines (width,
// height and segments are required, anything else is ignored) up to the
// line "data", then run rows "s r c1 c2" assigning label s to row r, columns
// c1..c2 inclusive. Every pixel must be covered exactly once.
inline LabelGrid parse_seg(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  long width = -1;
  long height = -1;
  long segments = -1;
  bool in_data = false;
  Grid<int> labels;

  const auto next_line = [&](std::string_view& out) {
    if (pos >= text.size()) return false;
    const std::size_t end = text.find('\n', pos);
    out = text.substr(pos, end == std::string_view::npos ? end : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    return true;
  };

  std::string_view raw;
  while (!in_data) {
    if (!next_line(raw)) {
      throw ParseError::at_line("missing 'data' section", line_no);
    }
    const std::string_view line = seg_detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "data") {
      for (const auto& [key, value] : {std::pair<const char*, long>{"width", width},
                                       {"height", height},
                                       {"segments", segments}}) {
        if (value < 0) {
          throw ParseError::at_line(std::string("missing header key '") + key + "'", line_no);
        }
      }
      if (width == 0 || height == 0) {
        throw ParseError::at_line("zero dimension", line_no);
      }
      if (segments == 0) {
        throw ParseError::at_line("segment count must be positive", line_no);
      }
      if (width > (1 << 16) || height > (1 << 16) || width * height > (1L << 24)) {
        throw ParseError::at_line("dimensions too large", line_no);
      }
      labels = Grid<int>(static_cast<int>(width), static_cast<int>(height), -1);
      in_data = true;
      continue;
    }
    const auto tokens = seg_detail::split_ws(line);
    if (tokens.size() < 2) continue;  // valueless metadata line, ignore
    const auto header_int = [&](const char* what) {
      const long v = seg_detail::parse_int(tokens[1], what, line_no);
      if (v < 0) {
        throw ParseError::at_line(std::string("negative ") + what, line_no);
      }
      return v;
    };
    if (tokens[0] == "width") width = header_int("width");
    else if (tokens[0] == "height") height = header_int("height");
    else if (tokens[0] == "segments") segments = header_int("segment count");
    // other header keys (format, date, image, user, ...) are metadata
  }

  long covered = 0;
  while (next_line(raw)) {
    const std::string_view line = seg_detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = seg_detail::split_ws(line);
    if (tokens.size() != 4) {
      throw ParseError::at_line("expected 4 fields in data row", line_no);
    }
    const long s = seg_detail::parse_int(tokens[0], "label", line_no);
    const long r = seg_detail::parse_int(tokens[1], "row", line_no);
    const long c1 = seg_detail::parse_int(tokens[2], "start column", line_no);
    const long c2 = seg_detail::parse_int(tokens[3], "end column", line_no);
    if (s < 0 || s >= segments) {
      throw ParseError::at_line("label out of range", line_no);
    }
    if (r < 0 || r >= height) {
      throw ParseError::at_line("row out of range", line_no);
    }
    if (c1 < 0 || c2 < c1 || c2 >= width) {
      throw ParseError::at_line("column range out of bounds", line_no);
    }
    for (long c = c1; c <= c2; ++c) {
      int& cell = labels(static_cast<int>(c), static_cast<int>(r));
      if (cell != -1) {
        throw ParseError("overlap at line " + std::to_string(line_no), line_no);
      }
      cell = static_cast<int>(s);
      ++covered;
    }
  }
  if (covered != width * height) {
    throw ParseError::at_line("uncovered pixels", line_no);
  }
  return LabelGrid{std::move(labels), static_cast<int>(segments)};
}

// Canonical re-serialization (debug aid): parse_seg(serialize_seg(g))
// reproduces g exactly.
inline std::string serialize_seg(const LabelGrid& grid) {
  std::ostringstream out;
  out << "format ascii cr\n";
  out << "width " << grid.width() << "\n";
  out << "height " << grid.height() << "\n";
  out << "segments " << grid.segment_count << "\n";
  out << "data\n";
  for (int y = 0; y < grid.height(); ++y) {
    int run_start = 0;
    for (int x = 1; x <= grid.width(); ++x) {
      if (x == grid.width() || grid.labels(x, y) != grid.labels(run_start, y)) {
        out << grid.labels(run_start, y) << ' ' << y << ' ' << run_start << ' ' << (x - 1)
            << '\n';
        run_start = x;
      }
    }
  }
  return std::move(out).str();
}

// Marks a pixel when any in-bounds 4-neighbor carries a different label;
// both sides of every label change are marked.
inline BinaryMask boundary_mask(const LabelGrid& grid) {
  BinaryMask out(grid.width(), grid.height(), 0);
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const int label = grid.labels(x, y);
      const bool edge = (x > 0 && grid.labels(x - 1, y) != label) ||
                        (x + 1 < grid.width() && grid.labels(x + 1, y) != label) ||
                        (y > 0 && grid.labels(x, y - 1) != label) ||
                        (y + 1 < grid.height() && grid.labels(x, y + 1) != label);
      out(x, y) = edge ? 1 : 0;
    }
  }
  return out;
}

// Manifest line: image path, optionally followed by a tab and a second path
// (ground truth for eval, ignored by batch). gt_path is empty for
// single-field lines.
struct ManifestEntry {
  std::string image_path;
  std::string gt_path;
};

inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::filesystem::path base = path.parent_path();
  const auto resolve = [&base](std::string_view field) {
    std::filesystem::path p{std::string(field)};
    if (p.is_relative()) p = base / p;
    return p.string();
  };

  std::vector<ManifestEntry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view raw(text.data() + pos,
                         (end == std::string::npos ? text.size() : end) - pos);
    pos = end == std::string::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const std::string_view line = seg_detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == '\t') {
        fields.push_back(seg_detail::trim(line.substr(start, i - start)));
        start = i + 1;
      }
    }
    if (fields.size() > 2) {
      throw ParseError::at_line("expected 2 fields", line_no);
    }
    if (fields.empty() || fields[0].empty()) {
      throw ParseError::at_line("empty image path", line_no);
    }
    ManifestEntry entry;
    entry.image_path = resolve(fields[0]);
    if (fields.size() == 2 && !fields[1].empty()) {
      entry.gt_path = resolve(fields[1]);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace cec
