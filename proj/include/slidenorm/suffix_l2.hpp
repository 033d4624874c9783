#pragma once

#include <cstdint>
#include <vector>

#include "slidenorm/ams.hpp"

namespace slidenorm {

inline constexpr double kHistogramRatio = 17.0 / 16.0;

// Smooth histogram of suffix L2 estimates (FreqEst). Timestamps are 1-based
// stream positions; the sketch of timestamp a covers updates a..now. A
// substream of a longer stream passes its global positions via update_at so
// windows stay in global time.
class SuffixL2Estimator {
 public:
  struct Options {
    int reps = kDefaultAmsReps;
    int groups = kDefaultAmsGroups;
    double ratio = kHistogramRatio;
    // When nonzero, also drops timestamps b with b < c < now-window+1.
    uint64_t window = 0;
  };

  explicit SuffixL2Estimator(uint64_t seed);
  SuffixL2Estimator(uint64_t seed, Options opt);

  // Feeds one insertion. Returns the keep-mask over the timestamp list as it
  // stood after appending the new timestamp (old list plus one entry).
  const std::vector<uint8_t>& update(uint64_t item);
  // Same at an explicit position; positions must strictly increase.
  const std::vector<uint8_t>& update_at(uint64_t item, uint64_t pos);

  // Number of updates fed.
  uint64_t length() const { return length_; }
  // Position of the latest update.
  uint64_t now() const { return now_; }
  const std::vector<uint64_t>& timestamps() const { return ts_; }
  // X_a for each retained timestamp, as of the latest update.
  const std::vector<double>& estimates() const { return est_; }
  double ratio() const { return opt_.ratio; }
  uint64_t window() const { return opt_.window; }

  // F with F <= ||f_window||_2 <= 2F (w.h.p.), for 1 <= W <= now().
  double query(uint64_t W) const;
  // Window of the W positions ending at clock `now` (now >= this->now());
  // 0 when no update falls inside.
  double query_at(uint64_t W, uint64_t now) const;

  // ceil(log_C(U^2)) + 2 for U = length().
  size_t timestamp_bound() const;

  // Histogram and expiry invariants on the current estimates.
  bool invariant_holds() const;

  // Retained AMS accumulator snapshots (reps per timestamp).
  size_t snapshot_entries() const { return snap_.size(); }

 private:
  void compact();

  Options opt_;
  AmsSigns signs_;
  uint64_t length_ = 0;
  uint64_t now_ = 0;
  std::vector<double> z_;
  std::vector<double> sig_;
  std::vector<uint64_t> ts_;
  std::vector<double> snap_;
  std::vector<double> est_;
  std::vector<uint8_t> keep_;
  std::vector<double> sufmax_;
};

}  // namespace slidenorm
