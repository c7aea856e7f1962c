#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace trecom {

// Seedable generator with a portable draw API. The std distributions are
// implementation-defined, so bounded integers and unit reals are derived here
// directly from the 64-bit engine output; results are bit-identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  // Independent stream for replica/chain `index`, derived from `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniform in (0, 1].
  double uniform01();

  std::string serialize() const;
  static Rng deserialize(const std::string& state);

  bool operator==(const Rng& o) const { return engine_ == o.engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace trecom
