#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace stratshap {

// Seeded generator with portable derived distributions. The standard library
// distributions are implementation-defined, so uniform, integer and normal
// draws are spelled out here to keep fixtures byte-identical across
// toolchains. Normals use the Box-Muller transform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on {0..n-1}, rejection sampled so it is unbiased.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t k = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[k]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Independent stream seed for (seed, stream) via SplitMix64 mixing.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace stratshap
