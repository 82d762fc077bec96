#include "psychflow/util/io.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "psychflow/errors.hpp"

namespace psychflow::util {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open '{}' for reading", path));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_directory(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create directory '{}': {}", dir, ec.message()));
  }
}

void write_file_atomic(const std::string& path, std::string_view content) {
  fs::path target(path);
  if (target.has_parent_path()) {
    ensure_directory(target.parent_path().string());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError(fmt::format("cannot open '{}' for writing", tmp.string()));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError(fmt::format("failed writing '{}'", tmp.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw IoError(fmt::format("cannot rename '{}' to '{}': {}", tmp.string(), target.string(),
                              ec.message()));
  }
}

}  // namespace psychflow::util
