#include "slidenorm/hashing.hpp"

#include <random>
#include <stdexcept>

namespace slidenorm {

uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b) {
  std::seed_seq seq{static_cast<uint32_t>(master), static_cast<uint32_t>(master >> 32),
                    static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                    static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32)};
  std::mt19937_64 gen(seq);
  return gen();
}

PolyHash::PolyHash(int k, uint64_t seed) {
  if (k < 1) throw std::invalid_argument("PolyHash: independence must be >= 1");
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<uint64_t> dist(0, kMersenne61 - 1);
  coef_.resize(static_cast<size_t>(k));
  for (auto& c : coef_) c = dist(gen);
  // A zero leading coefficient would lower the degree; redraw.
  if (k > 1) {
    while (coef_.back() == 0) coef_.back() = dist(gen);
  }
}

}  // namespace slidenorm
