#pragma once

#include <cstdint>
#include <vector>

#include "slidenorm/hashing.hpp"

namespace slidenorm {

inline constexpr int kDefaultAmsReps = 48;
inline constexpr int kDefaultAmsGroups = 6;

// The r independent 4-wise sign functions of an AMS sketch.
class AmsSigns {
 public:
  AmsSigns() = default;
  AmsSigns(int reps, uint64_t seed);

  int reps() const { return static_cast<int>(hash_.size()); }
  int sign(int r, uint64_t item) const { return hash_[r].sign(item); }
  void signs(uint64_t item, double* out) const;

 private:
  std::vector<PolyHash> hash_;
};

// Median over `groups` of the mean of squared accumulators inside each group.
// Returns the F2 (squared L2) estimate.
double ams_median_of_means(const double* acc, int reps, int groups);

// Standalone AMS F2 sketch.
class AmsSketch {
 public:
  AmsSketch(uint64_t seed, int reps = kDefaultAmsReps, int groups = kDefaultAmsGroups);

  void update(uint64_t item, int64_t delta = 1);
  double f2_estimate() const;
  double l2_estimate() const;
  const std::vector<double>& accumulators() const { return acc_; }
  int reps() const { return signs_.reps(); }
  int groups() const { return groups_; }

 private:
  AmsSigns signs_;
  int groups_;
  std::vector<double> acc_;
};

}  // namespace slidenorm
