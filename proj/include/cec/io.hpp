#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cec/error.hpp"

namespace cec {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw IoError("read failure on '" + path.string() + "'");
  }
  return std::move(buf).str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out.good()) {
    throw IoError("write failure on '" + path.string() + "'");
  }
}

// Writes to a sibling temp file, then renames over the target so readers
// never observe a half-written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, bytes);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " +
                  ec.message());
  }
}

}  // namespace cec
