#ifndef GROUPWALK_RNG_HPP
#define GROUPWALK_RNG_HPP

#include <cstdint>

namespace groupwalk {

// Counter-based splittable generator ("sm64ctr-v1", recorded in every
// manifest).  A draw is a pure function of (key, counter), so a stream can be
// evaluated at any index without materializing earlier draws, and two-sided
// environment realizations stay genuinely invertible.  Splitting derives an
// independent key from (key, child id); child streams never share counters.
class Rng {
 public:
  static constexpr const char* kAlgorithmId = "sm64ctr-v1";

  Rng() = default;
  explicit Rng(uint64_t key) : key_(key) {}

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t key() const { return key_; }

  // Value at an explicit counter (stateless access).
  uint64_t at(uint64_t counter) const { return mix(key_ ^ mix(counter * 0xda942042e4dd58b5ULL)); }
  double uniform_at(uint64_t counter) const { return to_unit(at(counter)); }

  // Sequential convenience interface over the same counter space.
  uint64_t next() { return at(counter_++); }
  double uniform() { return to_unit(next()); }

  Rng split(uint64_t child) const { return Rng(mix(key_ ^ mix(child ^ 0x5851f42d4c957f2dULL))); }

  // Map a signed index into the counter space (two-sided sequences).
  static uint64_t zigzag(int64_t i) {
    return (static_cast<uint64_t>(i) << 1) ^ static_cast<uint64_t>(i >> 63);
  }

 private:
  static double to_unit(uint64_t v) {
    return static_cast<double>(v >> 11) * 0x1.0p-53;  // [0,1)
  }

  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace groupwalk

#endif
