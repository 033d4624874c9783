#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace slidenorm {

struct LevelBucket {
  int level = 0;
  double count = 0.0;
};

// Multiset of level representatives: bucket j stands for b_j entries of value
// alpha^(j+u), and covers magnitudes in [alpha^(j-1+u), alpha^(j+u)).
class LevelVector {
 public:
  LevelVector() = default;
  LevelVector(double alpha, double offset, uint64_t universe);

  // Exact level vector V(x) of a vector of magnitudes (zeros are skipped).
  static LevelVector from_values(std::span<const double> x, double alpha, double offset,
                                 uint64_t universe);

  int level_of(double v) const;
  double value(int level) const;
  double lower_edge(int level) const;

  // Adds count entries at a level; buckets stay sorted by level.
  void add(int level, double count);

  const std::vector<LevelBucket>& buckets() const { return buckets_; }
  bool empty() const { return buckets_.empty(); }
  double alpha() const { return alpha_; }
  double offset() const { return offset_; }
  uint64_t universe() const { return universe_; }
  double total_count() const;

  // Level vector holding only the idx-th bucket.
  LevelVector bucket_only(size_t idx) const;
  LevelVector without(const std::vector<uint8_t>& drop) const;

  // Fully expanded entries, for expansions up to max_entries.
  std::vector<double> expand(size_t max_entries = 10'000'000) const;

  // Descending (value, count) runs.
  std::vector<std::pair<double, double>> runs_descending() const;

  void validate() const;

 private:
  double alpha_ = 2.0;
  double offset_ = 0.0;
  double log_alpha_ = 0.6931471805599453;
  uint64_t universe_ = 0;
  std::vector<LevelBucket> buckets_;
};

}  // namespace slidenorm
