#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace infbo {

// Seedable random stream with cheap deterministic forking.
//
// A stream is identified by a 64-bit key derived from its parent's key and a
// fork label, so child streams for (replication, iteration, phase) are
// decorrelated by construction and independent of how much the parent has
// been consumed. Draws come from a mt19937_64 seeded with the mixed key.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : key_(mix(seed ^ kRootSalt)), engine_(key_) {}

  // Child stream for a numeric label. Forking does not consume parent state.
  RngStream fork(std::uint64_t label) const {
    return RngStream(FromKey{}, mix(key_ ^ mix(label + kForkSalt)));
  }

  // Child stream for a named phase ("gibbs", "acq", ...).
  RngStream fork(std::string_view label) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : label) {
      h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
      h *= 1099511628211ull;
    }
    return fork(h);
  }

  // One draw uniform on [0, 1), with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as an argument to log().
  double uniform01_open_left() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return engine_(); }

  std::uint64_t key() const { return key_; }

private:
  struct FromKey {};
  RngStream(FromKey, std::uint64_t key) : key_(key), engine_(key) {}

  // splitmix64 finalizer; avalanches every input bit.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  static constexpr std::uint64_t kRootSalt = 0x8f1bbcdc5c6e01a3ull;
  static constexpr std::uint64_t kForkSalt = 0x243f6a8885a308d3ull;

  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace infbo
