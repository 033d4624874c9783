#include "slidenorm/count_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slidenorm/errors.hpp"

namespace slidenorm {

CountSketchHashes::CountSketchHashes(int rows, uint64_t width, uint64_t seed)
    : rows_(rows), width_(width), seed_(seed) {
  if (rows < 1) throw ParameterError("CountSketch: rows must be >= 1");
  if (width < 1) throw ParameterError("CountSketch: width must be >= 1");
  bucket_.reserve(rows);
  sign_.reserve(rows);
  for (int r = 0; r < rows; ++r) {
    bucket_.emplace_back(2, derive_seed(seed, static_cast<uint64_t>(r), 0));
    sign_.emplace_back(4, derive_seed(seed, static_cast<uint64_t>(r), 1));
  }
}

uint64_t count_sketch_width(double nu) {
  if (!(nu > 0.0) || !(nu < 1.0)) throw ParameterError("CountSketch: nu must lie in (0,1)");
  double w = std::ceil(1.0 / (nu * nu));
  if (w >= static_cast<double>(kMaxSparseWidth)) return kMaxSparseWidth;
  return static_cast<uint64_t>(w);
}

int64_t median_of_rows(std::vector<int64_t>& readings) {
  auto mid = readings.begin() + static_cast<std::ptrdiff_t>(readings.size() / 2);
  std::nth_element(readings.begin(), mid, readings.end());
  return *mid;
}

CountSketch::CountSketch(uint64_t universe, int rows, uint64_t width, double nu, uint64_t seed)
    : universe_(universe), nu_(nu), hashes_(rows, width, seed) {
  if (universe < 1) throw ParameterError("CountSketch: universe must be >= 1");
  if (!(nu > 0.0) || !(nu < 1.0)) throw ParameterError("CountSketch: nu must lie in (0,1)");
  if (width > (uint64_t{1} << 28) / static_cast<uint64_t>(rows)) {
    throw ParameterError("CountSketch: dense table of " + std::to_string(width) +
                         " columns is too large");
  }
  table_.assign(static_cast<size_t>(rows) * width, 0);
  cap_ = static_cast<size_t>(std::ceil(2.0 / (nu * nu)));
}

void CountSketch::check_item(uint64_t item) const {
  if (item < 1 || item > universe_) {
    throw RangeError("CountSketch: item " + std::to_string(item) + " outside [1, " +
                     std::to_string(universe_) + "]");
  }
}

void CountSketch::update(uint64_t item, int64_t delta) {
  check_item(item);
  const uint64_t w = hashes_.width();
  for (int r = 0; r < hashes_.rows(); ++r) {
    table_[static_cast<size_t>(r) * w + hashes_.bucket(r, item)] += hashes_.sign(r, item) * delta;
  }
  if (delta > 0) track(item);
}

int64_t CountSketch::estimate(uint64_t item) const {
  check_item(item);
  const uint64_t w = hashes_.width();
  std::vector<int64_t> readings(static_cast<size_t>(hashes_.rows()));
  for (int r = 0; r < hashes_.rows(); ++r) {
    readings[r] = hashes_.sign(r, item) * table_[static_cast<size_t>(r) * w + hashes_.bucket(r, item)];
  }
  return median_of_rows(readings);
}

void CountSketch::track(uint64_t item) {
  candidates_[item] = estimate(item);
  if (candidates_.size() <= 2 * cap_) return;
  std::vector<std::pair<int64_t, uint64_t>> all;
  all.reserve(candidates_.size());
  for (const auto& [id, _] : candidates_) all.emplace_back(estimate(id), id);
  std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cap_), all.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  all.resize(cap_);
  candidates_.clear();
  for (const auto& [est, id] : all) candidates_[id] = est;
}

std::vector<uint64_t> CountSketch::heavy_hitters(double l2_estimate) const {
  if (!(l2_estimate > 0.0)) throw ParameterError("heavy_hitters: l2_estimate must be positive");
  const double thr = 0.5 * nu_ * l2_estimate;
  std::vector<uint64_t> out;
  for (const auto& [id, _] : candidates_) {
    if (static_cast<double>(estimate(id)) >= thr) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void CountSketch::merge(const CountSketch& other) {
  if (!hashes_.same_family(other.hashes_) || universe_ != other.universe_) {
    throw ParameterError("CountSketch::merge: sketches differ in dimensions or seeds");
  }
  for (size_t i = 0; i < table_.size(); ++i) table_[i] += other.table_[i];
  for (const auto& [id, _] : other.candidates_) candidates_[id] = 0;
  for (auto& [id, est] : candidates_) est = estimate(id);
}

}  // namespace slidenorm
