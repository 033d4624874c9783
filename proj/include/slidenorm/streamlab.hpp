#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/container/flat_hash_map.h"
#include "slidenorm/gfunction.hpp"
#include "slidenorm/norms.hpp"

namespace slidenorm {

enum class Variant { AppendixC, Zipf, Uniform };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

struct SyntheticSpec {
  uint64_t m = 1024;
  uint64_t n = 65536;
  uint64_t seed = 1;
  Variant variant = Variant::AppendixC;
  double zipf_s = 1.1;

  void validate() const;
};

// s1 s1 s2 followed by floor(m/1000) copies of item 1.
std::vector<uint64_t> gen_appendix_c(const SyntheticSpec& spec);
// Item k drawn with probability proportional to k^-s.
std::vector<uint64_t> gen_zipf(const SyntheticSpec& spec);
std::vector<uint64_t> gen_uniform(const SyntheticSpec& spec);
std::vector<uint64_t> generate(const SyntheticSpec& spec);

uint64_t appendix_c_tail(uint64_t m);

// Standard Gaussian rows of width d. With a response, each row gets
// b = <a, x*> + noise * N(0,1) appended for a hidden Gaussian x*.
std::vector<Eigen::VectorXd> gen_gaussian_rows(uint64_t count, size_t d, uint64_t seed, bool response = false,
                                               double noise = 0.1);

// Exact frequencies of the last W updates.
class ExactWindowOracle {
 public:
  explicit ExactWindowOracle(uint64_t W);

  void push(uint64_t item);
  uint64_t frequency(uint64_t item) const;
  const absl::flat_hash_map<uint64_t, uint64_t>& frequencies() const { return freq_; }
  std::vector<double> frequency_values() const;
  double l2() const;
  double norm(const NormDescriptor& norm) const;
  double orlicz(const GFunction& g, double tol = 1e-10) const;
  // Recount from the ring buffer and compare with the incremental map.
  bool self_check() const;
  uint64_t window() const { return W_; }
  size_t size() const { return buf_.size(); }

 private:
  uint64_t W_;
  std::deque<uint64_t> buf_;
  absl::flat_hash_map<uint64_t, uint64_t> freq_;
};

// Window frequency map of stream[size-W, size).
absl::flat_hash_map<uint64_t, uint64_t> window_frequencies(const std::vector<uint64_t>& stream, uint64_t W);
std::vector<double> window_frequency_values(const std::vector<uint64_t>& stream, uint64_t W);

enum class BaselineMode { Stream, Universe };

struct BaselineResult {
  double estimate = 0.0;
  // No unbiased rescaling exists for this norm in universe mode; raw value.
  bool unscaled = false;
};

BaselineResult baseline_uniform(const std::vector<uint64_t>& stream, double rate, BaselineMode mode,
                                uint64_t W, const NormDescriptor& norm, uint64_t seed);

double relative_error(double estimate, double exact);

}  // namespace slidenorm
