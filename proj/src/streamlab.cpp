#include "slidenorm/streamlab.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "slidenorm/errors.hpp"
#include "slidenorm/hashing.hpp"
#include "slidenorm/orlicz.hpp"

namespace slidenorm {

Variant variant_from_string(const std::string& s) {
  if (s == "appendix-c" || s == "appendixc") return Variant::AppendixC;
  if (s == "zipf") return Variant::Zipf;
  if (s == "uniform") return Variant::Uniform;
  throw ParameterError("unknown stream variant '" + s + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::AppendixC: return "appendix-c";
    case Variant::Zipf: return "zipf";
    case Variant::Uniform: return "uniform";
  }
  return "?";
}

static bool is_pow2(uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

void SyntheticSpec::validate() const {
  if (m < 1) throw ParameterError("stream length m must be >= 1");
  if (n < 1) throw ParameterError("universe n must be >= 1");
  if (variant == Variant::AppendixC) {
    if (!is_pow2(m) || m < 8) throw ParameterError("appendix-c needs m a power of two, m >= 8 (got " + std::to_string(m) + ")");
    if (!is_pow2(n)) throw ParameterError("appendix-c needs n a power of two (got " + std::to_string(n) + ")");
    if (n <= m / 2 + 1) throw ParameterError("appendix-c needs n > m/2 + 1");
  }
  if (variant == Variant::Zipf && !(zipf_s > 0.0)) throw ParameterError("zipf exponent must be positive");
}

uint64_t appendix_c_tail(uint64_t m) { return m / 1000; }

std::vector<uint64_t> gen_appendix_c(const SyntheticSpec& spec) {
  SyntheticSpec s = spec;
  s.variant = Variant::AppendixC;
  s.validate();
  const uint64_t m = s.m, quarter = m / 4, tail = appendix_c_tail(m);
  const uint64_t s2_len = m - 2 * quarter - tail;
  std::vector<uint64_t> out;
  out.reserve(m);
  for (int rep = 0; rep < 2; ++rep) {
    for (uint64_t v = 2; v <= quarter + 1; ++v) out.push_back(v);
  }
  std::mt19937_64 gen(s.seed);
  std::uniform_int_distribution<uint64_t> dist(m / 2 + 2, s.n);
  for (uint64_t i = 0; i < s2_len; ++i) out.push_back(dist(gen));
  out.insert(out.end(), tail, 1);
  return out;
}

std::vector<uint64_t> gen_zipf(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<double> w(spec.n);
  for (uint64_t k = 0; k < spec.n; ++k) w[k] = std::pow(static_cast<double>(k + 1), -spec.zipf_s);
  std::discrete_distribution<uint64_t> dist(w.begin(), w.end());
  std::mt19937_64 gen(spec.seed);
  std::vector<uint64_t> out(spec.m);
  for (auto& v : out) v = dist(gen) + 1;
  return out;
}

std::vector<uint64_t> gen_uniform(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 gen(spec.seed);
  std::uniform_int_distribution<uint64_t> dist(1, spec.n);
  std::vector<uint64_t> out(spec.m);
  for (auto& v : out) v = dist(gen);
  return out;
}

std::vector<Eigen::VectorXd> gen_gaussian_rows(uint64_t count, size_t d, uint64_t seed, bool response,
                                               double noise) {
  if (d < 1) throw ParameterError("gaussian rows: d must be >= 1");
  if (count < 1) throw ParameterError("gaussian rows: count must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd xs(static_cast<Eigen::Index>(d));
  for (auto& v : xs) v = nd(gen);
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(count);
  const Eigen::Index w = static_cast<Eigen::Index>(d) + (response ? 1 : 0);
  for (uint64_t i = 0; i < count; ++i) {
    Eigen::VectorXd r(w);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(d); ++k) r(k) = nd(gen);
    if (response) r(w - 1) = r.head(static_cast<Eigen::Index>(d)).dot(xs) + noise * nd(gen);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<uint64_t> generate(const SyntheticSpec& spec) {
  switch (spec.variant) {
    case Variant::AppendixC: return gen_appendix_c(spec);
    case Variant::Zipf: return gen_zipf(spec);
    case Variant::Uniform: return gen_uniform(spec);
  }
  throw ParameterError("unknown variant");
}

ExactWindowOracle::ExactWindowOracle(uint64_t W) : W_(W) {
  if (W < 1) throw ParameterError("oracle window must be >= 1");
}

void ExactWindowOracle::push(uint64_t item) {
  buf_.push_back(item);
  ++freq_[item];
  if (buf_.size() > W_) {
    uint64_t old = buf_.front();
    buf_.pop_front();
    auto it = freq_.find(old);
    if (--it->second == 0) freq_.erase(it);
  }
}

uint64_t ExactWindowOracle::frequency(uint64_t item) const {
  auto it = freq_.find(item);
  return it == freq_.end() ? 0 : it->second;
}

std::vector<double> ExactWindowOracle::frequency_values() const {
  std::vector<double> v;
  v.reserve(freq_.size());
  for (const auto& [_, f] : freq_) v.push_back(static_cast<double>(f));
  std::sort(v.begin(), v.end());
  return v;
}

double ExactWindowOracle::l2() const {
  double s = 0.0;
  for (const auto& [_, f] : freq_) s += static_cast<double>(f) * static_cast<double>(f);
  return std::sqrt(s);
}

double ExactWindowOracle::norm(const NormDescriptor& norm) const {
  auto v = frequency_values();
  return norm.evaluate_values(v);
}

double ExactWindowOracle::orlicz(const GFunction& g, double tol) const {
  auto v = frequency_values();
  return orlicz_norm(v, g, tol);
}

bool ExactWindowOracle::self_check() const {
  std::unordered_map<uint64_t, uint64_t> recount;
  for (uint64_t x : buf_) ++recount[x];
  if (recount.size() != freq_.size()) return false;
  for (const auto& [k, v] : recount) {
    if (frequency(k) != v) return false;
  }
  return true;
}

absl::flat_hash_map<uint64_t, uint64_t> window_frequencies(const std::vector<uint64_t>& stream, uint64_t W) {
  absl::flat_hash_map<uint64_t, uint64_t> f;
  size_t begin = stream.size() > W ? stream.size() - W : 0;
  for (size_t i = begin; i < stream.size(); ++i) ++f[stream[i]];
  return f;
}

std::vector<double> window_frequency_values(const std::vector<uint64_t>& stream, uint64_t W) {
  auto f = window_frequencies(stream, W);
  std::vector<double> v;
  v.reserve(f.size());
  for (const auto& [_, c] : f) v.push_back(static_cast<double>(c));
  std::sort(v.begin(), v.end());
  return v;
}

BaselineResult baseline_uniform(const std::vector<uint64_t>& stream, double rate, BaselineMode mode,
                                uint64_t W, const NormDescriptor& norm, uint64_t seed) {
  if (!(rate > 0.0) || !(rate <= 1.0)) throw ParameterError("baseline rate must lie in (0,1]");
  BaselineResult res;
  size_t begin = stream.size() > W ? stream.size() - W : 0;
  if (mode == BaselineMode::Stream) {
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution keep(rate);
    absl::flat_hash_map<uint64_t, double> f;
    for (size_t i = begin; i < stream.size(); ++i) {
      if (rate >= 1.0 || keep(gen)) f[stream[i]] += 1.0 / rate;
    }
    std::vector<double> v;
    v.reserve(f.size());
    for (const auto& [_, c] : f) v.push_back(c);
    std::sort(v.begin(), v.end());
    res.estimate = norm.evaluate_values(v);
    return res;
  }
  PolyHash h(2, derive_seed(seed, 99));
  absl::flat_hash_map<uint64_t, double> f;
  for (size_t i = begin; i < stream.size(); ++i) {
    if (rate >= 1.0 || h.unit(stream[i]) < rate) f[stream[i]] += 1.0;
  }
  std::vector<double> v;
  v.reserve(f.size());
  for (const auto& [_, c] : f) v.push_back(c);
  std::sort(v.begin(), v.end());
  double raw = norm.evaluate_values(v);
  if (auto p = norm.lp_exponent()) {
    res.estimate = raw * std::pow(rate, -1.0 / *p);
  } else {
    res.estimate = raw;
    res.unscaled = rate < 1.0;
  }
  return res;
}

double relative_error(double estimate, double exact) {
  if (exact == 0.0) return estimate == 0.0 ? 0.0 : INFINITY;
  return std::fabs(estimate - exact) / std::fabs(exact);
}

}  // namespace slidenorm
