#include "slidenorm/sliding_hh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slidenorm/errors.hpp"

namespace slidenorm {

namespace {

inline uint64_t cell_key(uint64_t bucket, int row) {
  return (bucket << 4) | static_cast<uint64_t>(row);
}

void merge_into(absl::flat_hash_map<uint64_t, int64_t>& dst,
                absl::flat_hash_map<uint64_t, int64_t>& src) {
  if (src.size() > dst.size()) dst.swap(src);
  for (const auto& [k, v] : src) {
    auto [it, inserted] = dst.try_emplace(k, v);
    if (!inserted) {
      it->second += v;
      if (it->second == 0) dst.erase(it);
    }
  }
  src.clear();
}

}  // namespace

size_t HHConfig::candidate_cap() const {
  if (candidate_cap_override > 0) return candidate_cap_override;
  double c = 2.0 * std::pow(sketch_divisor / (nu * eta), 2.0);
  if (c > 1e18) return static_cast<size_t>(1e18);
  return static_cast<size_t>(std::ceil(c));
}

bool HHConfig::nonconforming() const {
  return ratio != kHistogramRatio || sketch_divisor != 32.0 || report_factor != 0.5 ||
         candidate_cap_override != 0;
}

void HHConfig::validate() const {
  if (window < 1) throw ParameterError("HHConfig: window must be >= 1");
  if (!(eta > 0.0) || !(eta < 1.0)) throw ParameterError("HHConfig: eta must lie in (0,1)");
  if (!(nu > 0.0) || !(nu < 0.25)) throw ParameterError("HHConfig: nu must lie in (0,1/4)");
  if (universe < 1) throw ParameterError("HHConfig: universe must be >= 1");
  if (!(sketch_threshold() > 0.0)) throw ParameterError("HHConfig: nu*eta/32 must be positive");
  if (sketch_rows < 1 || sketch_rows > 15) throw ParameterError("HHConfig: sketch rows must lie in [1,15]");
}

std::string HHDiagnostics::to_kv() const {
  std::ostringstream os;
  os << "timestamps=" << timestamps << "\n"
     << "timestamp_bound=" << timestamp_bound << "\n"
     << "sketch_cells=" << sketch_cells << "\n"
     << "tracked_items=" << tracked_items << "\n"
     << "counters=" << counters << "\n"
     << "snapshot_entries=" << snapshot_entries << "\n"
     << "ams_entries=" << ams_entries << "\n"
     << "candidate_cap=" << candidate_cap << "\n"
     << "space_entries=" << space_entries() << "\n";
  return os.str();
}

static SuffixL2Estimator::Options fe_options(const HHConfig& cfg) {
  cfg.validate();
  SuffixL2Estimator::Options o;
  o.reps = cfg.ams_reps;
  o.groups = cfg.ams_groups;
  o.ratio = cfg.ratio;
  o.window = cfg.window;
  return o;
}

SlidingHeavyHitters::SlidingHeavyHitters(const HHConfig& cfg, uint64_t seed)
    : cfg_(cfg),
      sketch_nu_(cfg.sketch_threshold()),
      fe_(derive_seed(seed, 1), fe_options(cfg)),
      hashes_(cfg.sketch_rows, count_sketch_width(cfg.sketch_threshold()), derive_seed(seed, 2)) {}

bool SlidingHeavyHitters::counter_live(const TrackedCounter& c) const {
  const auto& ts = fe_.timestamps();
  auto it = std::upper_bound(ts.begin(), ts.end(), c.attach_lo);
  return it != ts.end() && *it <= c.ctr.start();
}

void SlidingHeavyHitters::update(uint64_t item) { update_at(item, fe_.now() + 1); }

void SlidingHeavyHitters::update_at(uint64_t item, uint64_t pos) {
  if (item < 1 || item > cfg_.universe) {
    throw RangeError("sliding_hh: item " + std::to_string(item) + " outside [1, " +
                     std::to_string(cfg_.universe) + "]");
  }
  const std::vector<uint8_t>& keep = fe_.update_at(item, pos);
  const uint64_t t = pos;

  segments_.emplace_back();
  Segment& fresh = segments_.back();
  for (int r = 0; r < hashes_.rows(); ++r) {
    fresh[cell_key(hashes_.bucket(r, item), r)] += hashes_.sign(r, item);
  }
  apply_compaction(keep);

  ItemTrack& tr = items_[item];
  auto& cs = tr.counters;
  size_t w = 0;
  for (size_t k = 0; k < cs.size(); ++k) {
    if (!counter_live(cs[k])) continue;
    if (w != k) cs[w] = std::move(cs[k]);
    cs[w].ctr.add(t);
    ++w;
  }
  counter_total_ -= cs.size() - w;
  cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(w), cs.end());
  // The newest suffix holds only this update, so the item is heavy there.
  TrackedCounter fresh_ctr{tr.last_arrival, ApproxCounter(t, cfg_.nu)};
  fresh_ctr.ctr.add(t);
  cs.push_back(std::move(fresh_ctr));
  ++counter_total_;
  tr.last_arrival = t;

  if (counter_total_ > prune_at_) {
    prune_all();
    prune_at_ = std::max<size_t>(4096, 2 * counter_total_);
  }
  if (items_.size() > cfg_.candidate_cap()) enforce_cap();
}

void SlidingHeavyHitters::apply_compaction(const std::vector<uint8_t>& keep) {
  size_t w = 0;
  bool have_prev = false;
  for (size_t k = 0; k < keep.size(); ++k) {
    if (keep[k]) {
      if (w != k) segments_[w] = std::move(segments_[k]);
      ++w;
      have_prev = true;
    } else if (have_prev) {
      merge_into(segments_[w - 1], segments_[k]);
    }
    // An expired oldest segment is dropped.
  }
  segments_.resize(w);
}

void SlidingHeavyHitters::prune_all() {
  counter_total_ = 0;
  for (auto it = items_.begin(); it != items_.end();) {
    auto& cs = it->second.counters;
    cs.erase(std::remove_if(cs.begin(), cs.end(),
                            [&](const TrackedCounter& c) { return !counter_live(c); }),
             cs.end());
    if (cs.empty()) {
      items_.erase(it++);
    } else {
      counter_total_ += cs.size();
      ++it;
    }
  }
}

void SlidingHeavyHitters::enforce_cap() {
  prune_all();
  const size_t cap = cfg_.candidate_cap();
  if (items_.size() <= cap) return;
  std::vector<std::pair<uint64_t, uint64_t>> by_count;
  by_count.reserve(items_.size());
  for (const auto& [id, tr] : items_) {
    uint64_t best = 0;
    for (const auto& c : tr.counters) best = std::max(best, c.ctr.count());
    by_count.emplace_back(best, id);
  }
  std::sort(by_count.begin(), by_count.end(),
            [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  for (size_t k = cap; k < by_count.size(); ++k) {
    auto it = items_.find(by_count[k].second);
    counter_total_ -= it->second.counters.size();
    items_.erase(it);
  }
}

int64_t SlidingHeavyHitters::suffix_estimate(uint64_t item, size_t idx) const {
  if (idx >= segments_.size()) throw ParameterError("suffix_estimate: timestamp index out of range");
  std::vector<int64_t> rows(static_cast<size_t>(hashes_.rows()), 0);
  for (int r = 0; r < hashes_.rows(); ++r) {
    const uint64_t key = cell_key(hashes_.bucket(r, item), r);
    int64_t s = 0;
    for (size_t k = idx; k < segments_.size(); ++k) {
      auto it = segments_[k].find(key);
      if (it != segments_[k].end()) s += it->second;
    }
    rows[r] = hashes_.sign(r, item) * s;
  }
  return median_of_rows(rows);
}

bool SlidingHeavyHitters::in_heavy_set(uint64_t item, const TrackedCounter& c,
                                       std::vector<int64_t>& acc) const {
  const auto& ts = fe_.timestamps();
  const auto& est = fe_.estimates();
  size_t lo = static_cast<size_t>(std::upper_bound(ts.begin(), ts.end(), c.attach_lo) - ts.begin());
  size_t hi = static_cast<size_t>(std::upper_bound(ts.begin(), ts.end(), c.ctr.start()) - ts.begin());
  if (lo >= hi) return false;
  const int rows = hashes_.rows();
  std::vector<uint64_t> keys(static_cast<size_t>(rows));
  std::vector<int> signs(static_cast<size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    keys[r] = cell_key(hashes_.bucket(r, item), r);
    signs[r] = hashes_.sign(r, item);
  }
  acc.assign(static_cast<size_t>(rows), 0);
  std::vector<int64_t> readings(static_cast<size_t>(rows));
  // Walk suffixes from the newest segment down to the oldest candidate.
  for (size_t k = segments_.size(); k-- > lo;) {
    for (int r = 0; r < rows; ++r) {
      auto it = segments_[k].find(keys[r]);
      if (it != segments_[k].end()) acc[r] += it->second;
    }
    if (k < hi) {
      for (int r = 0; r < rows; ++r) readings[r] = signs[r] * acc[r];
      int64_t e = median_of_rows(readings);
      if (static_cast<double>(e) >= 0.5 * sketch_nu_ * est[k]) return true;
    }
  }
  return false;
}

double SlidingHeavyHitters::window_l2(uint64_t W) const { return window_l2_at(W, fe_.now()); }

double SlidingHeavyHitters::window_l2_at(uint64_t W, uint64_t now) const {
  if (fe_.length() == 0) return 0.0;
  uint64_t w = (W == 0) ? cfg_.window : W;
  if (w > cfg_.window) throw ParameterError("sliding_hh: query window exceeds the configured window");
  return fe_.query_at(std::min(w, now), now);
}

std::vector<HeavyHitterReport> SlidingHeavyHitters::report(uint64_t W) const { return report_at(W, fe_.now()); }

std::vector<HeavyHitterReport> SlidingHeavyHitters::report_at(uint64_t W, uint64_t now) const {
  std::vector<HeavyHitterReport> out;
  if (W > cfg_.window) throw ParameterError("report: W exceeds the configured window");
  if (now < fe_.now()) throw ParameterError("report: clock is behind the latest update");
  if (fe_.length() == 0) return out;
  const uint64_t w = std::min((W == 0) ? cfg_.window : W, now);
  const uint64_t start = now - w + 1;
  if (start > fe_.now()) return out;
  const double F = window_l2_at(w, now);
  const double thr = cfg_.report_factor * cfg_.eta * F;
  std::vector<int64_t> scratch;
  std::vector<std::pair<double, size_t>> vals;
  for (const auto& [id, tr] : items_) {
    vals.clear();
    for (size_t k = 0; k < tr.counters.size(); ++k) {
      const auto& c = tr.counters[k];
      if (!counter_live(c)) continue;
      double v;
      if (c.ctr.start() >= start) {
        v = static_cast<double>(c.ctr.query(now));
      } else {
        uint64_t lo = c.ctr.query(now), before = c.ctr.upper(start - 1);
        v = lo > before ? static_cast<double>(lo - before) : 0.0;
      }
      if (v >= thr && v > 0.0) vals.emplace_back(v, k);
    }
    if (vals.empty()) continue;
    std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (const auto& [v, k] : vals) {
      if (in_heavy_set(id, tr.counters[k], scratch)) {
        out.push_back({id, v, F, F > 0 ? v / F : 0.0, tr.counters[k].ctr.start()});
        break;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.item < b.item; });
  return out;
}

HHDiagnostics SlidingHeavyHitters::diagnostics() const {
  HHDiagnostics d;
  d.timestamps = fe_.timestamps().size();
  d.timestamp_bound = fe_.length() == 0 ? 0 : fe_.timestamp_bound();
  for (const auto& s : segments_) d.sketch_cells += s.size();
  for (const auto& [id, tr] : items_) {
    bool any = false;
    for (const auto& c : tr.counters) {
      if (!counter_live(c)) continue;
      any = true;
      ++d.counters;
      d.snapshot_entries += c.ctr.snapshot_count();
    }
    if (any) ++d.tracked_items;
  }
  d.ams_entries = fe_.snapshot_entries();
  d.candidate_cap = cfg_.candidate_cap();
  return d;
}

bool SlidingHeavyHitters::invariants_hold() const {
  if (!fe_.invariant_holds()) return false;
  if (segments_.size() != fe_.timestamps().size()) return false;
  if (items_.size() > cfg_.candidate_cap()) return false;
  return true;
}

}  // namespace slidenorm
