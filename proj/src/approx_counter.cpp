#include "slidenorm/approx_counter.hpp"

#include <algorithm>
#include <cmath>

#include "slidenorm/errors.hpp"

namespace slidenorm {

ApproxCounter::ApproxCounter(uint64_t start, double eta) : start_(start), eta_(eta) {
  if (!(eta > 0.0) || !(eta < 1.0)) throw ParameterError("ApproxCounter: eta must lie in (0,1)");
  small_limit_ = static_cast<uint64_t>(std::ceil(4.0 / eta));
}

void ApproxCounter::add(uint64_t pos) {
  if (pos < start_ || pos < last_) throw ParameterError("ApproxCounter::add: position out of order");
  last_ = pos;
  ++count_;
  if (count_ < small_limit_ || count_ >= next_) {
    snaps_.emplace_back(pos, count_);
    auto grown = static_cast<uint64_t>(std::ceil(static_cast<double>(count_) * (1.0 + eta_ / 4.0)));
    next_ = std::max(grown, count_ + 1);
  }
}

uint64_t ApproxCounter::query(uint64_t u) const {
  if (u < start_) throw ParameterError("ApproxCounter::query: u precedes the start position");
  auto it = std::upper_bound(snaps_.begin(), snaps_.end(), u,
                             [](uint64_t v, const auto& s) { return v < s.first; });
  if (it == snaps_.begin()) return 0;
  return std::prev(it)->second;
}

uint64_t ApproxCounter::upper(uint64_t u) const {
  if (u < start_) return 0;
  auto it = std::upper_bound(snaps_.begin(), snaps_.end(), u,
                             [](uint64_t v, const auto& s) { return v < s.first; });
  // The count first reached it->second strictly after u.
  if (it == snaps_.end()) return count_;
  return it->second - 1;
}

}  // namespace slidenorm
