#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace seedscope {

/// Philox4x64-10 counter-based block cipher (Salmon et al., "Parallel random
/// numbers: as easy as 1, 2, 3", SC'11). Bit-compatible with Random123 and
/// numpy.random.Philox.
struct Philox4x64 {
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Block generate(Block counter, Key key) noexcept;
};

/// Top byte of the second key word. Each subsystem draws from its own
/// domain so that, e.g., bootstrap replicate 3 and synthetic model 3 never
/// share a stream under the same seed.
enum class StreamDomain : std::uint64_t {
  split = 0,   // make_split / bootstrap replicates: index = replicate
  synth = 1,   // generate_pool: index 0 = per-point latents, 1 + k = model k
  sweep = 2,   // ensemble member sampling: index = size_index * reps + rep
};

/// A single Philox stream.
///
/// Stream-splitting rule: the key is {seed, (domain << 56) | index}; the
/// i-th block of four 64-bit outputs is Philox4x64-10({i, 0, 0, 0}, key),
/// consumed in word order. Streams are addressed by index, so the values a
/// worker sees never depend on scheduling.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Uniform index in [0, n) as floor(x * n / 2^64) on the next raw output.
  std::size_t index(std::size_t n) noexcept;

  /// Standard normal via Box-Muller; pairs are produced together and the
  /// sine branch is cached for the next call.
  double normal() noexcept;

 private:
  Philox4x64::Key key_;
  std::uint64_t block_ = 0;
  Philox4x64::Block buffer_{};
  int position_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace seedscope
