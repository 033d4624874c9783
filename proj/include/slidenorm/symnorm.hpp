#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slidenorm/hashing.hpp"
#include "slidenorm/levels.hpp"
#include "slidenorm/norms.hpp"
#include "slidenorm/sliding_hh.hpp"

namespace slidenorm {

enum class Mode { Provable, Practical };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

// Constant overrides applied in practical mode.
struct PracticalOverrides {
  uint64_t R_max = 64;
  std::optional<uint64_t> R;  // fixed repetition count, still clipped to R_max
  double nu_floor = 1e-3;
  double eta_floor = 1e-3;
  std::optional<double> nu;
  std::optional<double> eta;
  double alpha_scale = 0.25;      // alpha = 1 + alpha_scale * eps
  double eps_prime_scale = 0.5;   // eps' = eps_prime_scale * eps
};

struct SymNormParams {
  double eps = 0.2;
  double mmc_cap = 1.0;
  uint64_t universe = 1;
  Mode mode = Mode::Practical;

  double nu = 0.0;
  double eta = 0.0;
  uint64_t R = 1;
  double R_formula = 1.0;  // unclipped value of log^10 n / eps^5
  double alpha = 1.0;
  double beta = 0.0;
  double eps_prime = 0.0;
  double c_lo = 4.0;
  double c_hi = 64.0;
  bool nonconforming = false;

  std::string to_kv() const;
};

SymNormParams param_select(double eps, double mmc_cap, uint64_t n, Mode mode,
                           const PracticalOverrides& ov = {});

struct GridOptions {
  uint64_t window = 1;
  bool nested = false;         // one hash per repetition shared across levels
  size_t max_cells = 1 << 14;  // larger grids raise CapacityError
  int sketch_rows = kDefaultCountSketchRows;
};

// R repetitions x (L+1) sampling levels; cell (i, r) keeps item j iff its
// hash lands below 2^-i. Level 0 keeps every item.
class LayerGrid {
 public:
  LayerGrid(const SymNormParams& params, const GridOptions& opt, uint64_t seed);

  // Serial reference path.
  void update(uint64_t item);
  // Same result as calling update on each item; cells run in parallel.
  void update_batch(std::span<const uint64_t> items);

  bool admits(size_t level, size_t rep, uint64_t item) const;
  size_t levels() const { return levels_; }
  size_t reps() const { return reps_; }
  const SlidingHeavyHitters& cell(size_t level, size_t rep) const { return cells_[level * reps_ + rep]; }
  const SymNormParams& params() const { return params_; }
  const GridOptions& options() const { return opt_; }
  uint64_t length() const { return t_; }
  double offset() const { return offset_; }
  double mmc_cap() const { return params_.mmc_cap; }
  size_t space_entries() const;

 private:
  SymNormParams params_;
  GridOptions opt_;
  size_t levels_;
  size_t reps_;
  double offset_;
  uint64_t t_ = 0;
  std::vector<uint64_t> thresholds_;  // per level, in hash units
  std::vector<PolyHash> hashes_;      // per cell, or per repetition when nested
  std::vector<SlidingHeavyHitters> cells_;
};

struct LevelSizeReport {
  LevelVector levels;
  std::vector<int> omitted;      // observed levels without a valid sampling level
  std::vector<int> chosen_rate;  // i* per kept bucket, aligned with levels.buckets()
  std::string to_kv() const;
};

LevelSizeReport estimate_level_sizes(const LayerGrid& g, uint64_t W);

// Drops buckets with norm below beta * norm(levels).
double reconstruct_norm(const LevelVector& levels, const NormDescriptor& norm, double beta);

// Throws CapacityError when norm.mmc_bound(n) exceeds the grid's cap.
double symnorm_estimate(const LayerGrid& g, uint64_t W, const NormDescriptor& norm);
// Universal query: every norm answered from one level-size estimate.
std::vector<double> symnorm_estimate(const LayerGrid& g, uint64_t W,
                                     const std::vector<const NormDescriptor*>& norms);

std::string estimate_csv_header();
std::string estimate_csv_row(const std::string& norm, uint64_t W, double eps, Mode mode, double estimate,
                             std::optional<double> exact, uint64_t seed);

}  // namespace slidenorm
