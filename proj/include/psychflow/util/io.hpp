#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace psychflow::util {

/// Reads a whole file into memory; IoError if unreadable.
std::string read_file(const std::string& path);

/// Writes `content` to `path` atomically: the bytes go to a sibling
/// temporary file which is then renamed over the target, so a crash can
/// never leave a half-written file. Parent directories are created.
void write_file_atomic(const std::string& path, std::string_view content);

/// Creates `dir` (and parents) if needed; IoError on failure.
void ensure_directory(const std::string& dir);

/// 64-bit FNV-1a, the stable hash used for event traces and output digests.
inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace psychflow::util
