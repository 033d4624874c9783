#include "slidenorm/ams.hpp"

#include <algorithm>
#include <cmath>

#include "slidenorm/errors.hpp"

namespace slidenorm {

AmsSigns::AmsSigns(int reps, uint64_t seed) {
  if (reps < 1) throw ParameterError("AMS: repetitions must be >= 1");
  hash_.reserve(reps);
  for (int r = 0; r < reps; ++r) hash_.emplace_back(4, derive_seed(seed, static_cast<uint64_t>(r), 7));
}

void AmsSigns::signs(uint64_t item, double* out) const {
  for (size_t r = 0; r < hash_.size(); ++r) out[r] = hash_[r].sign(item);
}

namespace {

inline void cswap(double& a, double& b) {
  double lo = std::min(a, b), hi = std::max(a, b);
  a = lo;
  b = hi;
}

// Branchless median of six via a sorting network.
inline double median6(double* v) {
  cswap(v[1], v[2]); cswap(v[4], v[5]);
  cswap(v[0], v[2]); cswap(v[3], v[5]);
  cswap(v[0], v[1]); cswap(v[3], v[4]);
  cswap(v[1], v[4]); cswap(v[0], v[3]);
  cswap(v[2], v[5]); cswap(v[1], v[3]);
  cswap(v[2], v[4]); cswap(v[2], v[3]);
  return 0.5 * (v[2] + v[3]);
}

}  // namespace

double ams_median_of_means(const double* acc, int reps, int groups) {
  const int per = reps / groups;
  if (groups == 6 && per == 8) {
    double m[6];
    for (int g = 0; g < 6; ++g) {
      const double* p = acc + g * 8;
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += p[k] * p[k];
      m[g] = s * 0.125;
    }
    return median6(m);
  }
  double means[64];
  for (int g = 0; g < groups; ++g) {
    double s = 0.0;
    const double* p = acc + g * per;
    for (int k = 0; k < per; ++k) s += p[k] * p[k];
    means[g] = s / per;
  }
  std::sort(means, means + groups);
  if (groups % 2 == 1) return means[groups / 2];
  return 0.5 * (means[groups / 2 - 1] + means[groups / 2]);
}

AmsSketch::AmsSketch(uint64_t seed, int reps, int groups)
    : signs_(reps, seed), groups_(groups), acc_(static_cast<size_t>(reps), 0.0) {
  if (groups < 1 || groups > 64 || reps % groups != 0) {
    throw ParameterError("AMS: repetitions must split evenly into 1..64 groups");
  }
}

void AmsSketch::update(uint64_t item, int64_t delta) {
  for (int r = 0; r < signs_.reps(); ++r) acc_[r] += signs_.sign(r, item) * static_cast<double>(delta);
}

double AmsSketch::f2_estimate() const { return ams_median_of_means(acc_.data(), reps(), groups_); }

double AmsSketch::l2_estimate() const { return std::sqrt(f2_estimate()); }

}  // namespace slidenorm
