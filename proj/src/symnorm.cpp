#include "slidenorm/symnorm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "slidenorm/errors.hpp"

namespace slidenorm {

Mode mode_from_string(const std::string& s) {
  if (s == "provable") return Mode::Provable;
  if (s == "practical") return Mode::Practical;
  throw ParameterError("unknown mode '" + s + "' (expected provable|practical)");
}

std::string to_string(Mode m) { return m == Mode::Provable ? "provable" : "practical"; }

std::string SymNormParams::to_kv() const {
  std::ostringstream os;
  os.precision(10);
  os << "mode=" << to_string(mode) << "\n"
     << "eps=" << eps << "\n"
     << "mmc_cap=" << mmc_cap << "\n"
     << "universe=" << universe << "\n"
     << "nu=" << nu << "\n"
     << "eta=" << eta << "\n"
     << "R=" << R << "\n"
     << "R_formula=" << R_formula << "\n"
     << "alpha=" << alpha << "\n"
     << "beta=" << beta << "\n"
     << "eps_prime=" << eps_prime << "\n"
     << "c_lo=" << c_lo << "\n"
     << "c_hi=" << c_hi << "\n"
     << "nonconforming=" << (nonconforming ? 1 : 0) << "\n";
  return os.str();
}

SymNormParams param_select(double eps, double mmc_cap, uint64_t n, Mode mode, const PracticalOverrides& ov) {
  if (!(eps > 0.0) || !(eps < 0.5)) throw ParameterError("param_select: eps must lie in (0, 1/2)");
  if (!(mmc_cap >= 1.0)) throw ParameterError("param_select: mmc_cap must be >= 1");
  if (n < 1) throw ParameterError("param_select: universe must be >= 1");
  SymNormParams p;
  p.eps = eps;
  p.mmc_cap = mmc_cap;
  p.universe = n;
  p.mode = mode;
  const double logn = std::max(1.0, std::log2(static_cast<double>(n)));
  // unit constants
  p.nu = eps * eps / logn;
  p.eta = std::pow(eps, 2.5) / (mmc_cap * std::pow(logn, 2.5));
  p.R_formula = std::pow(logn, 10.0) / std::pow(eps, 5.0);
  p.alpha = 1.0 + eps;
  p.beta = std::pow(eps, 5.0) / (mmc_cap * mmc_cap * std::pow(logn, 5.0));
  p.eps_prime = eps * eps / logn;
  p.R = p.R_formula >= 1.8e19 ? UINT64_MAX : static_cast<uint64_t>(std::ceil(p.R_formula));
  if (mode == Mode::Practical) {
    p.nu = ov.nu.value_or(std::max(p.nu, ov.nu_floor));
    p.eta = ov.eta.value_or(std::max(p.eta, ov.eta_floor));
    p.R = std::min<uint64_t>(ov.R.value_or(p.R), ov.R_max);
    p.alpha = 1.0 + ov.alpha_scale * eps;
    p.eps_prime = ov.eps_prime_scale * eps;
    p.nonconforming = true;
  }
  if (p.R < 1) p.R = 1;
  return p;
}

LayerGrid::LayerGrid(const SymNormParams& params, const GridOptions& opt, uint64_t seed)
    : params_(params), opt_(opt) {
  if (params.universe < 1) throw ParameterError("LayerGrid: universe must be >= 1");
  if (opt.window < 1) throw ParameterError("LayerGrid: window must be >= 1");
  levels_ = static_cast<size_t>(std::ceil(std::log2(static_cast<double>(std::max<uint64_t>(params.universe, 2))))) + 1;
  if (params.R > opt.max_cells / levels_) {
    throw CapacityError("LayerGrid: " + std::to_string(params.R) + " x " + std::to_string(levels_) +
                        " cells exceed the configured limit of " + std::to_string(opt.max_cells));
  }
  reps_ = static_cast<size_t>(params.R);
  std::mt19937_64 gen(derive_seed(seed, 0x5157));
  offset_ = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
  for (size_t i = 0; i < levels_; ++i) thresholds_.push_back(i == 0 ? kMersenne61 : kMersenne61 >> i);

  HHConfig hc;
  hc.window = opt.window;
  hc.eta = params.eta;
  hc.nu = params.nu;
  hc.universe = params.universe;
  hc.sketch_rows = opt.sketch_rows;
  hc.validate();
  if (opt.nested) {
    for (size_t r = 0; r < reps_; ++r) hashes_.emplace_back(2, derive_seed(seed, 0x1000 + r, 1));
  } else {
    for (size_t i = 0; i < levels_; ++i)
      for (size_t r = 0; r < reps_; ++r) hashes_.emplace_back(2, derive_seed(seed, 0x1000 + r, 2 + i));
  }
  cells_.reserve(levels_ * reps_);
  for (size_t i = 0; i < levels_; ++i)
    for (size_t r = 0; r < reps_; ++r) cells_.emplace_back(hc, derive_seed(seed, 0x2000 + i, r));
}

bool LayerGrid::admits(size_t level, size_t rep, uint64_t item) const {
  if (level == 0) return true;
  const PolyHash& h = opt_.nested ? hashes_[rep] : hashes_[level * reps_ + rep];
  return h(item) < thresholds_[level];
}

void LayerGrid::update(uint64_t item) {
  if (item < 1 || item > params_.universe) {
    throw RangeError("LayerGrid: item " + std::to_string(item) + " outside [1, " +
                     std::to_string(params_.universe) + "]");
  }
  ++t_;
  for (size_t i = 0; i < levels_; ++i)
    for (size_t r = 0; r < reps_; ++r)
      if (admits(i, r, item)) cells_[i * reps_ + r].update_at(item, t_);
}

void LayerGrid::update_batch(std::span<const uint64_t> items) {
  for (uint64_t item : items) {
    if (item < 1 || item > params_.universe) {
      throw RangeError("LayerGrid: item " + std::to_string(item) + " outside [1, " +
                       std::to_string(params_.universe) + "]");
    }
  }
  const long ncells = static_cast<long>(cells_.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long c = 0; c < ncells; ++c) {
    size_t i = static_cast<size_t>(c) / reps_, r = static_cast<size_t>(c) % reps_;
    SlidingHeavyHitters& cell = cells_[static_cast<size_t>(c)];
    uint64_t pos = t_;
    for (uint64_t item : items) {
      ++pos;
      if (admits(i, r, item)) cell.update_at(item, pos);
    }
  }
  t_ += items.size();
}

size_t LayerGrid::space_entries() const {
  size_t s = 0;
  for (const auto& c : cells_) s += c.diagnostics().space_entries();
  return s;
}

std::string LevelSizeReport::to_kv() const {
  std::ostringstream os;
  os << "buckets=" << levels.buckets().size() << "\n";
  os << "omitted_levels=";
  for (size_t i = 0; i < omitted.size(); ++i) os << (i ? "," : "") << omitted[i];
  os << "\n";
  for (size_t b = 0; b < levels.buckets().size(); ++b) {
    os << "level." << levels.buckets()[b].level << "=" << levels.buckets()[b].count << "@rate2^-"
       << chosen_rate[b] << "\n";
  }
  return os.str();
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  double hi = v[h];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
  return 0.5 * (lo + hi);
}

}  // namespace

LevelSizeReport estimate_level_sizes(const LayerGrid& g, uint64_t W) {
  if (g.length() == 0) throw ParameterError("estimate_level_sizes: grid has no updates");
  const SymNormParams& p = g.params();
  const size_t L = g.levels(), R = g.reps();
  LevelVector proto(p.alpha, g.offset(), p.universe);

  std::vector<double> cell_F(L * R, 0.0);
  std::vector<std::vector<HeavyHitterReport>> reports(L * R);
  const long ncells = static_cast<long>(L * R);
#pragma omp parallel for schedule(dynamic, 1)
  for (long c = 0; c < ncells; ++c) {
    size_t i = static_cast<size_t>(c) / R, r = static_cast<size_t>(c) % R;
    reports[static_cast<size_t>(c)] = g.cell(i, r).report_at(W, g.length());
    cell_F[static_cast<size_t>(c)] = g.cell(i, r).window_l2_at(W, g.length());
  }
  int jmin = INT32_MAX, jmax = INT32_MIN;
  for (size_t c = 0; c < L * R; ++c) {
    for (const auto& h : reports[c]) {
      int j = proto.level_of(h.f_hat);
      jmin = std::min(jmin, j);
      jmax = std::max(jmax, j);
    }
  }
  LevelSizeReport out{LevelVector(p.alpha, g.offset(), p.universe), {}, {}};
  if (jmin > jmax) return out;
  const size_t nj = static_cast<size_t>(jmax - jmin + 1);
  // cnt[c * nj + (j - jmin)]
  std::vector<double> cnt(L * R * nj, 0.0);
  for (size_t c = 0; c < L * R; ++c)
    for (const auto& h : reports[c]) cnt[c * nj + static_cast<size_t>(proto.level_of(h.f_hat) - jmin)] += 1.0;

  const double lo_count = p.c_lo / (p.eps_prime * p.eps_prime);
  const double hi_count = p.c_hi / (p.eps_prime * p.eps_prime);
  for (int j = jmin; j <= jmax; ++j) {
    const size_t jj = static_cast<size_t>(j - jmin);
    const double edge = proto.lower_edge(j);
    bool seen = false;
    for (size_t c = 0; c < L * R && !seen; ++c) seen = cnt[c * nj + jj] > 0.0;
    if (!seen) continue;
    std::optional<size_t> chosen, fallback;
    double chosen_med = 0.0, fallback_med = 0.0;
    for (size_t i = 0; i < L; ++i) {
      size_t heavy = 0;
      std::vector<double> counts(R);
      for (size_t r = 0; r < R; ++r) {
        size_t c = i * R + r;
        counts[r] = cnt[c * nj + jj];
        // every item at this level is eta-heavy for the cell's window
        if (edge >= 2.0 * p.eta * cell_F[c]) ++heavy;
      }
      if (2 * heavy <= R) continue;
      double med = median(counts);
      if (!(med > 0.0) || med > hi_count) continue;
      if (!fallback) {
        fallback = i;
        fallback_med = med;
      }
      if (med >= lo_count) {
        chosen = i;
        chosen_med = med;
        break;
      }
    }
    if (!chosen) {
      chosen = fallback;
      chosen_med = fallback_med;
    }
    if (!chosen) {
      out.omitted.push_back(j);
      continue;
    }
    // The rate-1 row sees every item, so its count carries no sampling error
    // and is not shrunk.
    double b = *chosen == 0 ? std::floor(chosen_med)
                            : std::floor((1.0 - p.eps_prime / 2.0) * chosen_med *
                                         std::ldexp(1.0, static_cast<int>(*chosen)));
    if (b > 0.0) {
      out.levels.add(j, b);
      out.chosen_rate.push_back(static_cast<int>(*chosen));
    } else {
      out.omitted.push_back(j);
    }
  }
  return out;
}

double reconstruct_norm(const LevelVector& levels, const NormDescriptor& norm, double beta) {
  if (levels.empty()) return 0.0;
  double total = norm.evaluate(levels);
  if (!(beta > 0.0)) return total;
  std::vector<uint8_t> drop(levels.buckets().size(), 0);
  bool any = false;
  for (size_t b = 0; b < drop.size(); ++b) {
    if (norm.evaluate(levels.bucket_only(b)) < beta * total) {
      drop[b] = 1;
      any = true;
    }
  }
  return any ? norm.evaluate(levels.without(drop)) : total;
}

namespace {

void check_capacity(const LayerGrid& g, const NormDescriptor& norm) {
  double need = norm.mmc_bound(g.params().universe);
  if (need > g.mmc_cap() * (1.0 + 1e-12)) {
    throw CapacityError("norm " + norm.name() + " has mmc bound " + std::to_string(need) +
                        " above the grid capacity " + std::to_string(g.mmc_cap()));
  }
}

}  // namespace

double symnorm_estimate(const LayerGrid& g, uint64_t W, const NormDescriptor& norm) {
  return symnorm_estimate(g, W, std::vector<const NormDescriptor*>{&norm}).front();
}

std::vector<double> symnorm_estimate(const LayerGrid& g, uint64_t W,
                                     const std::vector<const NormDescriptor*>& norms) {
  for (const auto* n : norms) check_capacity(g, *n);
  LevelSizeReport rep = estimate_level_sizes(g, W);
  std::vector<double> out;
  out.reserve(norms.size());
  for (const auto* n : norms) out.push_back(reconstruct_norm(rep.levels, *n, g.params().beta));
  return out;
}

std::string estimate_csv_header() { return "norm,W,eps,mode,estimate,exact,relative_error,seed"; }

std::string estimate_csv_row(const std::string& norm, uint64_t W, double eps, Mode mode, double estimate,
                             std::optional<double> exact, uint64_t seed) {
  std::ostringstream os;
  os.precision(12);
  os << norm << "," << W << "," << eps << "," << to_string(mode) << "," << estimate << ",";
  if (exact) {
    os << *exact << "," << (*exact != 0.0 ? std::fabs(estimate - *exact) / *exact : 0.0);
  } else {
    os << ",";
  }
  os << "," << seed;
  return os.str();
}

}  // namespace slidenorm
