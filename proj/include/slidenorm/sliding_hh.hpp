#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "slidenorm/approx_counter.hpp"
#include "slidenorm/count_sketch.hpp"
#include "slidenorm/suffix_l2.hpp"

namespace slidenorm {

struct HHConfig {
  uint64_t window = 1;
  double eta = 0.1;
  double nu = 0.2;
  uint64_t universe = 1;

  // Fixed constants of the algorithm. Changing any of them marks the
  // configuration nonconforming.
  double ratio = kHistogramRatio;
  double sketch_divisor = 32.0;  // CountSketch threshold nu*eta/32
  double report_factor = 0.5;    // report when f_hat >= (eta/2) F
  size_t candidate_cap_override = 0;

  int sketch_rows = kDefaultCountSketchRows;
  int ams_reps = kDefaultAmsReps;
  int ams_groups = kDefaultAmsGroups;

  double sketch_threshold() const { return nu * eta / sketch_divisor; }
  // 2 * (32 / (nu * eta))^2 unless overridden.
  size_t candidate_cap() const;
  bool nonconforming() const;
  void validate() const;
};

struct HeavyHitterReport {
  uint64_t item = 0;
  double f_hat = 0.0;
  double F = 0.0;
  double heaviness = 0.0;  // f_hat / F
  uint64_t timestamp = 0;  // timestamp whose counter produced f_hat
};

struct HHDiagnostics {
  size_t timestamps = 0;
  size_t timestamp_bound = 0;
  size_t sketch_cells = 0;
  size_t tracked_items = 0;
  size_t counters = 0;
  size_t snapshot_entries = 0;
  size_t ams_entries = 0;
  size_t candidate_cap = 0;

  size_t space_entries() const {
    return sketch_cells + counters + snapshot_entries + ams_entries + timestamps;
  }
  // Flat key=value lines.
  std::string to_kv() const;
};

class SlidingHeavyHitters {
 public:
  SlidingHeavyHitters(const HHConfig& cfg, uint64_t seed);

  void update(uint64_t item);
  // Update at a global stream position (strictly increasing), for instances
  // fed a substream.
  void update_at(uint64_t item, uint64_t pos);

  // Report over the last W positions; W = 0 means the configured window.
  // W larger than the stream so far means the whole stream.
  std::vector<HeavyHitterReport> report(uint64_t W = 0) const;
  // Same with the window ending at global clock now >= this->now().
  std::vector<HeavyHitterReport> report_at(uint64_t W, uint64_t now) const;

  // Window L2 underestimate used by report(W).
  double window_l2(uint64_t W = 0) const;
  double window_l2_at(uint64_t W, uint64_t now) const;

  HHDiagnostics diagnostics() const;

  // Cheap per-update budget check: |T| and candidate count.
  size_t timestamp_count() const { return fe_.timestamps().size(); }
  size_t timestamp_bound() const { return fe_.timestamp_bound(); }
  size_t tracked_items() const { return items_.size(); }
  bool invariants_hold() const;

  // CountSketch estimate of item's count over the suffix starting at the
  // idx-th retained timestamp.
  int64_t suffix_estimate(uint64_t item, size_t idx) const;

  const HHConfig& config() const { return cfg_; }
  uint64_t length() const { return fe_.length(); }
  uint64_t now() const { return fe_.now(); }
  const SuffixL2Estimator& freq_est() const { return fe_; }

 private:
  struct TrackedCounter {
    uint64_t attach_lo;  // exclusive; the counter serves timestamps in (attach_lo, start]
    ApproxCounter ctr;
  };
  struct ItemTrack {
    uint64_t last_arrival = 0;
    std::vector<TrackedCounter> counters;
  };
  using Segment = absl::flat_hash_map<uint64_t, int64_t>;

  bool counter_live(const TrackedCounter& c) const;
  void apply_compaction(const std::vector<uint8_t>& keep);
  void prune_all();
  void enforce_cap();
  bool in_heavy_set(uint64_t item, const TrackedCounter& c,
                    std::vector<int64_t>& suffix_scratch) const;

  HHConfig cfg_;
  double sketch_nu_;
  SuffixL2Estimator fe_;
  CountSketchHashes hashes_;
  std::vector<Segment> segments_;
  absl::flat_hash_map<uint64_t, ItemTrack> items_;
  size_t counter_total_ = 0;
  size_t prune_at_ = 4096;
};

}  // namespace slidenorm
