#pragma once

#include <cstdint>
#include <random>

namespace bss {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// single user seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of sub-stream `stream` under `seed`. Channel j of a generated
/// signal bundle draws from stream j; algorithm initializations use
/// streams from a separate range (see Stream below).
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851F42D4C957F2DULL));
}

/// Well-known stream ids so that data generation and method initialization
/// never share random draws.
enum class Stream : std::uint64_t {
  kSourceBase = 0,      // + channel index
  kPcaInit = 1000,
  kIcaInit = 2000,
};

/// Portable random source: std::mt19937_64 (output fully specified by the
/// standard) plus hand-written uniform/normal transforms, since the
/// std:: distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal draw (Marsaglia polar method).
  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bss
