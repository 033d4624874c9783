#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace slidenorm {

// Deterministic counter of one item's occurrences since `start`, keeping
// snapshots whenever the count grows by a (1 + eta/4) factor. Counts below
// ceil(4/eta) are all kept.
class ApproxCounter {
 public:
  ApproxCounter(uint64_t start, double eta);

  // Occurrence at position pos; positions must be >= start and nondecreasing.
  void add(uint64_t pos);

  // Largest snapshot count recorded at a position <= u. Requires u >= start.
  uint64_t query(uint64_t u) const;

  // An upper bound on the true count over [start, u]; 0 when u < start.
  uint64_t upper(uint64_t u) const;

  uint64_t count() const { return count_; }
  uint64_t start() const { return start_; }
  uint64_t last_position() const { return last_; }
  double eta() const { return eta_; }
  size_t snapshot_count() const { return snaps_.size(); }
  const std::vector<std::pair<uint64_t, uint64_t>>& snapshots() const { return snaps_; }

 private:
  uint64_t start_;
  double eta_;
  uint64_t small_limit_;
  uint64_t count_ = 0;
  uint64_t next_ = 1;
  uint64_t last_ = 0;
  std::vector<std::pair<uint64_t, uint64_t>> snaps_;
};

}  // namespace slidenorm
