#pragma once
// Counter-based stream derivation plus a xoshiro256** engine.
// Every random quantity in a replicate is keyed by (seed, replicate, domain, index),
// so the value at a given bridge index never depends on the order of sampling.

#include <array>
#include <bit>
#include <cstdint>

namespace uihp {

constexpr uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr uint64_t derive_key(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  k = mix64(k ^ a);
  k = mix64(k ^ (b + 0x3c6ef372fe94f82bULL));
  return mix64(k ^ (c + 0xa54ff53a5f1d36f1ULL));
}

// maps signed indices to distinct unsigned keys
constexpr uint64_t zigzag(int64_t i) {
  return (static_cast<uint64_t>(i) << 1) ^ static_cast<uint64_t>(i >> 63);
}

constexpr double to_unit(uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

enum class Domain : uint64_t {
  step_right = 1,
  step_left = 2,
  graft = 3,
  graft_law = 4,
  geodesic = 5,
  replicate = 6,
  misc = 7,
};

struct StreamId {
  uint64_t seed = 0;
  uint64_t replicate = 0;

  uint64_t key(Domain d, uint64_t index) const {
    return derive_key(seed, replicate, static_cast<uint64_t>(d), index);
  }
};

class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t key = 0) {
    uint64_t z = key;
    for (auto& w : s_) {
      z += 0x9e3779b97f4a7c15ULL;
      w = mix64(z);
    }
  }
  Rng(const StreamId& id, Domain d, uint64_t index) : Rng(id.key(d, index)) {}

  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ULL; }

  uint64_t operator()() {
    const uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  double uniform01() { return to_unit((*this)()); }

  // uniform on {0, ..., n-1}; multiply-high reduction (bias < n / 2^64)
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  // uniform on {-1, 0, 1}
  int ternary() { return static_cast<int>(below(3)) - 1; }

  // P(k) = 2^{-(k+1)}
  uint32_t geometric_half() {
    uint32_t k = 0;
    for (;;) {
      const uint64_t x = (*this)();
      const int ones = std::countr_one(x);
      k += static_cast<uint32_t>(ones);
      if (ones < 64) return k;
    }
  }

  bool coin() { return ((*this)() >> 63) != 0; }

 private:
  std::array<uint64_t, 4> s_{};
};

}  // namespace uihp
