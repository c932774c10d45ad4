#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace bosedecay {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-mode derivation of a per-trajectory seed. Depends only on
// (seed, index), never on which worker runs the trajectory.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~index));
}

/// Random source owned by a single trajectory (or a single serial task).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  RandomStream(std::uint64_t seed, std::uint64_t index)
      : engine_(substream_seed(seed, index)) {}

  double normal() { return normal_(engine_); }

  // Uniform on the open interval (0, 1); safe to take the log of.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  // Ziggurat sampler; the polar method of std::normal_distribution costs
  // more than the rest of an Itô step.
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace bosedecay
