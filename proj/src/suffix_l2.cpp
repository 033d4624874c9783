#include "slidenorm/suffix_l2.hpp"

#include <algorithm>
#include <cmath>

#include "slidenorm/errors.hpp"

namespace slidenorm {

SuffixL2Estimator::SuffixL2Estimator(uint64_t seed) : SuffixL2Estimator(seed, Options{}) {}

SuffixL2Estimator::SuffixL2Estimator(uint64_t seed, Options opt)
    : opt_(opt), signs_(opt.reps, seed) {
  if (opt.groups < 1 || opt.groups > 64 || opt.reps % opt.groups != 0) {
    throw ParameterError("FreqEst: repetitions must split evenly into 1..64 groups");
  }
  if (!(opt.ratio > 1.0)) throw ParameterError("FreqEst: ratio must exceed 1");
  z_.assign(static_cast<size_t>(opt.reps), 0.0);
  sig_.assign(static_cast<size_t>(opt.reps), 0.0);
}

const std::vector<uint8_t>& SuffixL2Estimator::update(uint64_t item) { return update_at(item, now_ + 1); }

const std::vector<uint8_t>& SuffixL2Estimator::update_at(uint64_t item, uint64_t pos) {
  if (pos <= now_) throw ParameterError("FreqEst: update positions must strictly increase");
  const size_t r = static_cast<size_t>(opt_.reps);
  ++length_;
  now_ = pos;
  ts_.push_back(pos);
  // snap_ row a holds the AMS accumulators of the suffix starting at ts_[a]
  snap_.resize(snap_.size() + r, 0.0);
  signs_.signs(item, sig_.data());
  for (size_t k = 0; k < r; ++k) z_[k] += sig_[k];
  double* d = snap_.data();
  const size_t rows = ts_.size();
  est_.resize(rows);
  for (size_t a = 0; a < rows; ++a, d += r) {
    for (size_t k = 0; k < r; ++k) d[k] += sig_[k];
    est_[a] = std::sqrt(ams_median_of_means(d, opt_.reps, opt_.groups));
  }
  compact();
  return keep_;
}

void SuffixL2Estimator::compact() {
  const size_t t = ts_.size();
  keep_.assign(t, 1);
  size_t first = 0;
  if (opt_.window > 0 && now_ >= opt_.window) {
    const uint64_t start = now_ - opt_.window + 1;
    // Keep only the latest timestamp strictly before the window start.
    size_t before = static_cast<size_t>(std::lower_bound(ts_.begin(), ts_.end(), start) - ts_.begin());
    if (before >= 2) {
      for (size_t i = 0; i + 1 < before; ++i) keep_[i] = 0;
      first = before - 1;
    }
  }
  sufmax_.resize(t);
  double m = 0.0;
  for (size_t k = t; k-- > first;) {
    m = std::max(m, est_[k]);
    sufmax_[k] = m;
  }
  size_t i = first;
  while (i + 2 < t) {
    const double thr = est_[i] / opt_.ratio;
    // Farthest k with X_k >= X_i / C, i.e. X_i <= C * X_k.
    size_t lo = i + 2, hi = t;
    if (sufmax_[lo] < thr) {
      ++i;
      continue;
    }
    while (hi - lo > 1) {
      size_t mid = lo + (hi - lo) / 2;
      if (sufmax_[mid] >= thr) lo = mid; else hi = mid;
    }
    for (size_t b = i + 1; b < lo; ++b) keep_[b] = 0;
    i = lo;
  }
  size_t w = 0;
  const size_t reps = static_cast<size_t>(opt_.reps);
  for (size_t k = 0; k < t; ++k) {
    if (!keep_[k]) continue;
    if (w != k) {
      ts_[w] = ts_[k];
      est_[w] = est_[k];
      std::copy_n(snap_.begin() + static_cast<std::ptrdiff_t>(k * reps), reps,
                  snap_.begin() + static_cast<std::ptrdiff_t>(w * reps));
    }
    ++w;
  }
  ts_.resize(w);
  est_.resize(w);
  snap_.resize(w * reps);
}

double SuffixL2Estimator::query(uint64_t W) const { return query_at(W, now_); }

double SuffixL2Estimator::query_at(uint64_t W, uint64_t now) const {
  if (now < now_) throw ParameterError("FreqEst::query: clock is behind the latest update");
  if (W < 1 || W > now) throw ParameterError("FreqEst::query: W must lie in [1, now]");
  if (opt_.window > 0 && W > opt_.window) {
    throw ParameterError("FreqEst::query: W exceeds the configured window");
  }
  const uint64_t start = now - W + 1;
  if (ts_.empty() || start > now_) return 0.0;
  size_t a = static_cast<size_t>(std::upper_bound(ts_.begin(), ts_.end(), start) - ts_.begin());
  // Expiry always leaves a timestamp before any queryable start, so an oldest
  // timestamp after the start means nothing was ever dropped: the window is
  // that whole suffix.
  if (a == 0) return est_[0] / std::sqrt(2.0);
  --a;
  if (ts_[a] == start) return est_[a] / std::sqrt(2.0);
  // start falls strictly between two retained timestamps.
  return std::sqrt(est_[a] * est_[a + 1]) / std::sqrt(2.0);
}

size_t SuffixL2Estimator::timestamp_bound() const {
  if (length_ == 0) return 2;
  double u2 = 2.0 * std::log(static_cast<double>(length_));
  return static_cast<size_t>(std::ceil(u2 / std::log(opt_.ratio) - 1e-12)) + 2;
}

bool SuffixL2Estimator::invariant_holds() const {
  const size_t t = ts_.size();
  for (size_t k = 1; k < t; ++k) {
    if (ts_[k] <= ts_[k - 1]) return false;
  }
  if (t > 0 && ts_.back() != now_) return false;
  if (opt_.window > 0 && now_ >= opt_.window) {
    const uint64_t start = now_ - opt_.window + 1;
    size_t before = static_cast<size_t>(std::lower_bound(ts_.begin(), ts_.end(), start) - ts_.begin());
    if (before >= 2) return false;
  }
  double m = 0.0;  // max X_c over c >= a + 2
  for (size_t a = t; a-- > 0;) {
    if (a + 2 >= t) continue;
    m = std::max(m, est_[a + 2]);
    if (est_[a] <= opt_.ratio * m) return false;
  }
  return true;
}

}  // namespace slidenorm
