#pragma once

#include <cstdint>

namespace rdelab::rng {

// SplitMix64 finalizer (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive combination of a key with one more word; used to walk
// tree paths and to derive replicate keys from a master seed.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t word) {
  return mix64(key ^ mix64(word + 0x9e3779b97f4a7c15ULL));
}

// Maps 64 random bits to the open interval (0,1).
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Stateless draw number `counter` of the substream identified by `key`.
constexpr double uniform_at(std::uint64_t key, std::uint64_t counter) {
  return to_open_unit(mix64(mix64(key) ^ (counter * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL)));
}

// Sequential view of one counter-based substream. Copying the stream
// replays it; nothing is shared between instances.
class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) : key_(key) {}

  constexpr double operator()() { return uniform_at(key_, counter_++); }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rdelab::rng
