#pragma once

#include <cstdint>
#include <vector>

namespace slidenorm {

inline constexpr uint64_t kMersenne61 = (uint64_t{1} << 61) - 1;

inline uint64_t mod_mersenne61(unsigned __int128 x) {
  uint64_t lo = static_cast<uint64_t>(x & kMersenne61);
  uint64_t hi = static_cast<uint64_t>(x >> 61);
  uint64_t r = lo + hi;
  if (r >= kMersenne61) r -= kMersenne61;
  return r;
}

inline uint64_t mulmod61(uint64_t a, uint64_t b) {
  return mod_mersenne61(static_cast<unsigned __int128>(a) * b);
}

// Derives a stream of independent 64-bit seeds from one master seed.
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0);

// k-wise independent family: random degree-(k-1) polynomial over GF(2^61-1).
class PolyHash {
 public:
  PolyHash() = default;
  PolyHash(int k, uint64_t seed);

  // Value in [0, 2^61-1).
  uint64_t operator()(uint64_t x) const {
    uint64_t xr = x % kMersenne61;
    uint64_t acc = coef_.back();
    for (int i = static_cast<int>(coef_.size()) - 2; i >= 0; --i) {
      acc = mod_mersenne61(static_cast<unsigned __int128>(acc) * xr + coef_[i]);
    }
    return acc;
  }

  // Value in [0, range).
  uint64_t bucket(uint64_t x, uint64_t range) const { return (*this)(x) % range; }

  // +1 or -1.
  int sign(uint64_t x) const { return ((*this)(x) & 1) ? 1 : -1; }

  // Uniform in [0,1).
  double unit(uint64_t x) const {
    return static_cast<double>((*this)(x)) / static_cast<double>(kMersenne61);
  }

  int independence() const { return static_cast<int>(coef_.size()); }

 private:
  std::vector<uint64_t> coef_;
};

}  // namespace slidenorm
