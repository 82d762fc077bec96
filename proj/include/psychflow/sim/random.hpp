#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>

namespace psychflow::sim {

/// Independent random-number streams per (seed, replication, purpose).
///
/// Each purpose owns its own stream so that drawing more (or fewer) numbers
/// for one concern never perturbs another — e.g. adding review-time draws
/// does not shift arrival times. Arrival streams are further split per
/// source entity so that common-random-number comparisons keep every other
/// entity's arrival process bit-identical when one entity's rate changes.
enum class StreamPurpose : std::uint64_t {
  Arrivals = 1,
  Attributes = 2,
  LengthOfStay = 3,
  Review = 4,
};

std::string_view to_string(StreamPurpose purpose);

namespace detail {

/// splitmix64 output function; also used to avalanche seeds.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

}  // namespace detail

/// A small, fast, reproducible generator (splitmix64). State is one 64-bit
/// word; streams with different keys start at avalanched positions whose
/// overlap probability is negligible for simulation-scale draw counts.
class RngStream {
 public:
  /// `entity` distinguishes substreams within one purpose (0 = the shared
  /// stream). Identical keys always reproduce the identical sequence.
  RngStream(std::uint64_t seed, std::uint64_t replication, StreamPurpose purpose,
            std::uint64_t entity = 0) {
    std::uint64_t h = detail::mix64(seed + detail::kGolden);
    h = detail::mix64(h ^ (replication + detail::kGolden));
    h = detail::mix64(h ^ (static_cast<std::uint64_t>(purpose) * 0x2545f4914f6cdd1dull));
    h = detail::mix64(h ^ (entity + 0x452821e638d01377ull));
    state_ = h;
  }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exponential with the given mean, by inversion. Strictly positive.
  double exponential(double mean) {
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return -mean * std::log(u);
  }

  /// Triangular(min, mode, max) by inversion. Degenerate spans return min.
  double triangular(double min, double mode, double max) {
    if (!(min <= mode && mode <= max)) {
      throw std::invalid_argument("triangular requires min <= mode <= max");
    }
    double span = max - min;
    if (span <= 0.0) return min;
    double u = uniform01();
    double fc = (mode - min) / span;
    if (u < fc) return min + std::sqrt(u * span * (mode - min));
    return max - std::sqrt((1.0 - u) * span * (max - mode));
  }

  /// Uniform index in [0, n). Unbiased via 128-bit multiply.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index requires n > 0");
    using u128 = unsigned __int128;
    return static_cast<std::size_t>((static_cast<u128>(next_u64()) * n) >> 64);
  }

  /// Index drawn with probability weights[i] / sum(weights).
  std::size_t weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("weighted_index requires positive total");
    double x = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (x < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  std::uint64_t state_ = 0;
};

}  // namespace psychflow::sim
