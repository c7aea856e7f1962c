#include "trecom/rng.hpp"

#include <limits>
#include <sstream>

#include "trecom/error.hpp"

namespace trecom {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::uniform01() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

std::string Rng::serialize() const {
  std::ostringstream ss;
  ss << engine_;
  return ss.str();
}

Rng Rng::deserialize(const std::string& state) {
  Rng r;
  std::istringstream ss(state);
  ss >> r.engine_;
  if (!ss) throw ParseError("corrupt rng state");
  return r;
}

}  // namespace trecom
