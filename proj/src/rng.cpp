#include "rglab/rng.hpp"

namespace rglab {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t key) : key_(key) {
  // Expand the key into a full seed sequence so streams with nearby keys do
  // not start in correlated engine states.
  std::uint64_t s = key;
  std::seed_seq seq{
      static_cast<std::uint32_t>(s = splitmix64(s)),
      static_cast<std::uint32_t>(s >> 32),
      static_cast<std::uint32_t>(s = splitmix64(s)),
      static_cast<std::uint32_t>(s >> 32),
      static_cast<std::uint32_t>(s = splitmix64(s)),
      static_cast<std::uint32_t>(s >> 32),
      static_cast<std::uint32_t>(s = splitmix64(s)),
      static_cast<std::uint32_t>(s >> 32),
  };
  engine_.seed(seq);
}

RngStream RngStream::root(std::uint64_t seed) {
  return RngStream(splitmix64(seed));
}

RngStream RngStream::child(std::string_view label, std::uint64_t index) const {
  std::uint64_t k = key_;
  k = splitmix64(k ^ fnv1a(label));
  k = splitmix64(k ^ index);
  return RngStream(k);
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform01() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::normal() { return gauss_(engine_); }

}  // namespace rglab
