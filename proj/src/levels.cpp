#include "slidenorm/levels.hpp"

#include <algorithm>
#include <cmath>

#include "slidenorm/errors.hpp"

namespace slidenorm {

LevelVector::LevelVector(double alpha, double offset, uint64_t universe)
    : alpha_(alpha), offset_(offset), log_alpha_(std::log(alpha)), universe_(universe) {
  if (!(alpha > 1.0)) throw ParameterError("LevelVector: alpha must exceed 1");
  if (!(offset >= 0.0) || !(offset < 1.0)) throw ParameterError("LevelVector: offset must lie in [0,1)");
}

LevelVector LevelVector::from_values(std::span<const double> x, double alpha, double offset,
                                     uint64_t universe) {
  LevelVector lv(alpha, offset, universe);
  std::vector<int> levels;
  levels.reserve(x.size());
  for (double v : x) {
    double a = std::fabs(v);
    if (a > 0.0) levels.push_back(lv.level_of(a));
  }
  std::sort(levels.begin(), levels.end());
  for (size_t i = 0; i < levels.size();) {
    size_t j = i;
    while (j < levels.size() && levels[j] == levels[i]) ++j;
    lv.buckets_.push_back({levels[i], static_cast<double>(j - i)});
    i = j;
  }
  return lv;
}

int LevelVector::level_of(double v) const {
  if (!(v > 0.0)) throw ParameterError("LevelVector::level_of: value must be positive");
  int j = static_cast<int>(std::floor(std::log(v) / log_alpha_ - offset_)) + 1;
  while (lower_edge(j) > v) --j;
  while (value(j) <= v) ++j;
  return j;
}

double LevelVector::value(int level) const { return std::exp((level + offset_) * log_alpha_); }

double LevelVector::lower_edge(int level) const {
  return std::exp((level - 1 + offset_) * log_alpha_);
}

void LevelVector::add(int level, double count) {
  if (!(count > 0.0)) return;
  auto it = std::lower_bound(buckets_.begin(), buckets_.end(), level,
                             [](const LevelBucket& b, int l) { return b.level < l; });
  if (it != buckets_.end() && it->level == level) {
    it->count += count;
  } else {
    buckets_.insert(it, {level, count});
  }
}

double LevelVector::total_count() const {
  double s = 0.0;
  for (const auto& b : buckets_) s += b.count;
  return s;
}

LevelVector LevelVector::bucket_only(size_t idx) const {
  LevelVector lv(alpha_, offset_, universe_);
  lv.buckets_.push_back(buckets_.at(idx));
  return lv;
}

LevelVector LevelVector::without(const std::vector<uint8_t>& drop) const {
  LevelVector lv(alpha_, offset_, universe_);
  for (size_t i = 0; i < buckets_.size(); ++i) {
    if (i >= drop.size() || !drop[i]) lv.buckets_.push_back(buckets_[i]);
  }
  return lv;
}

std::vector<double> LevelVector::expand(size_t max_entries) const {
  double total = total_count();
  if (total > static_cast<double>(max_entries)) {
    throw CapacityError("LevelVector::expand: expansion exceeds the entry limit");
  }
  std::vector<double> out;
  out.reserve(static_cast<size_t>(total));
  for (const auto& b : buckets_) {
    double v = value(b.level);
    auto c = static_cast<size_t>(std::llround(b.count));
    out.insert(out.end(), c, v);
  }
  return out;
}

std::vector<std::pair<double, double>> LevelVector::runs_descending() const {
  std::vector<std::pair<double, double>> r;
  r.reserve(buckets_.size());
  for (auto it = buckets_.rbegin(); it != buckets_.rend(); ++it) r.emplace_back(value(it->level), it->count);
  return r;
}

void LevelVector::validate() const {
  for (size_t i = 0; i < buckets_.size(); ++i) {
    if (!(buckets_[i].count > 0.0)) throw InputError("LevelVector: counts must be positive");
    if (i > 0 && buckets_[i].level <= buckets_[i - 1].level) {
      throw InputError("LevelVector: levels must be strictly increasing");
    }
  }
  if (universe_ > 0 && total_count() > static_cast<double>(universe_)) {
    throw InputError("LevelVector: total count exceeds the universe size");
  }
}

}  // namespace slidenorm
