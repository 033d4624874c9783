#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "slidenorm/hashing.hpp"

namespace slidenorm {

// Per-row bucket (2-wise) and sign (4-wise) hash functions shared by every
// sketch built from the same seed.
class CountSketchHashes {
 public:
  CountSketchHashes() = default;
  CountSketchHashes(int rows, uint64_t width, uint64_t seed);

  int rows() const { return rows_; }
  uint64_t width() const { return width_; }
  uint64_t seed() const { return seed_; }

  uint64_t bucket(int r, uint64_t item) const { return bucket_[r].bucket(item, width_); }
  int sign(int r, uint64_t item) const { return sign_[r].sign(item); }

  bool same_family(const CountSketchHashes& o) const {
    return rows_ == o.rows_ && width_ == o.width_ && seed_ == o.seed_;
  }

 private:
  int rows_ = 0;
  uint64_t width_ = 0;
  uint64_t seed_ = 0;
  std::vector<PolyHash> bucket_;
  std::vector<PolyHash> sign_;
};

// Width ceil(1/nu^2) clipped to kMaxSparseWidth; rows default to 5.
uint64_t count_sketch_width(double nu);
inline constexpr uint64_t kMaxSparseWidth = uint64_t{1} << 56;
inline constexpr int kDefaultCountSketchRows = 5;

// Median of the per-row signed readings (upper median for even row counts).
int64_t median_of_rows(std::vector<int64_t>& readings);

// Dense CountSketch over the universe [1, n] with candidate tracking.
class CountSketch {
 public:
  CountSketch(uint64_t universe, int rows, uint64_t width, double nu, uint64_t seed);

  void update(uint64_t item, int64_t delta);
  int64_t estimate(uint64_t item) const;

  // Tracked candidates with estimate >= (nu/2) * l2_estimate, ascending id.
  std::vector<uint64_t> heavy_hitters(double l2_estimate) const;

  // Entrywise addition; requires identical dimensions and seeds.
  void merge(const CountSketch& other);

  int rows() const { return hashes_.rows(); }
  uint64_t width() const { return hashes_.width(); }
  double nu() const { return nu_; }
  uint64_t universe() const { return universe_; }
  const std::vector<int64_t>& table() const { return table_; }
  size_t candidate_cap() const { return cap_; }
  size_t candidate_count() const { return candidates_.size(); }

 private:
  void check_item(uint64_t item) const;
  void track(uint64_t item);

  uint64_t universe_;
  double nu_;
  CountSketchHashes hashes_;
  std::vector<int64_t> table_;
  size_t cap_;
  absl::flat_hash_map<uint64_t, int64_t> candidates_;
};

}  // namespace slidenorm
