#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rglab {

// Counter-splittable random stream. A stream is identified by a 64-bit key;
// child streams are derived from (key, label, index) without consuming any
// state from the parent, so the substream layout of a run is a pure function
// of the root seed. This is what makes parallel replicates reproducible
// independently of scheduling.
class RngStream {
 public:
  static RngStream root(std::uint64_t seed);

  // Derivation does not touch the parent's engine state; calling child() in
  // any order, any number of times, yields the same streams.
  [[nodiscard]] RngStream child(std::string_view label,
                                std::uint64_t index = 0) const;

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double normal();     // N(0, 1)

  std::uint64_t key() const { return key_; }

 private:
  explicit RngStream(std::uint64_t key);

  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace rglab
