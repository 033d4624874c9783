#include "slidenorm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slidenorm/errors.hpp"

namespace slidenorm {

namespace mmc {

double qprime(uint64_t n) { return std::max(1.0, std::log2(static_cast<double>(std::max<uint64_t>(n, 2)))); }

double lp(uint64_t n, double p) {
  if (p <= 2.0) return qprime(n);
  return std::max(1.0, std::pow(static_cast<double>(n), 0.5 - 1.0 / p));
}

double topk(uint64_t n, uint64_t k) {
  return std::max(1.0, std::sqrt(static_cast<double>(n) / static_cast<double>(std::max<uint64_t>(k, 1))));
}

double ksupport(uint64_t n, uint64_t) { return qprime(n); }

double box(uint64_t n) { return qprime(n); }

}  // namespace mmc

namespace {

class LpNorm final : public NormDescriptor {
 public:
  explicit LpNorm(double p) : p_(p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("L_p norm needs finite p >= 1");
  }
  std::string name() const override {
    std::ostringstream os;
    os << "L" << p_;
    return os.str();
  }
  std::string params() const override {
    std::ostringstream os;
    os << "p=" << p_;
    return os.str();
  }
  double evaluate(const LevelVector& lv) const override {
    if (lv.empty()) return 0.0;
    double vmax = lv.value(lv.buckets().back().level);
    double s = 0.0;
    for (const auto& b : lv.buckets()) s += b.count * std::pow(lv.value(b.level) / vmax, p_);
    return vmax * std::pow(s, 1.0 / p_);
  }
  double evaluate_values(std::span<const double> x) const override {
    double vmax = 0.0;
    for (double v : x) vmax = std::max(vmax, std::fabs(v));
    if (vmax == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) s += std::pow(std::fabs(v) / vmax, p_);
    return vmax * std::pow(s, 1.0 / p_);
  }
  double mmc_bound(uint64_t n) const override { return mmc::lp(n, p_); }
  std::optional<double> lp_exponent() const override { return p_; }

 private:
  double p_;
};

class TopKNorm final : public NormDescriptor {
 public:
  explicit TopKNorm(uint64_t k) : k_(k) {
    if (k < 1) throw ParameterError("top-k norm needs k >= 1");
  }
  std::string name() const override { return "top" + std::to_string(k_); }
  std::string params() const override { return "k=" + std::to_string(k_); }
  double evaluate(const LevelVector& lv) const override {
    double left = static_cast<double>(k_), s = 0.0;
    for (auto it = lv.buckets().rbegin(); it != lv.buckets().rend() && left > 0.0; ++it) {
      double take = std::min(left, it->count);
      s += take * lv.value(it->level);
      left -= take;
    }
    return s;
  }
  double evaluate_values(std::span<const double> x) const override {
    std::vector<double> a(x.size());
    for (size_t i = 0; i < x.size(); ++i) a[i] = std::fabs(x[i]);
    size_t k = std::min<size_t>(k_, a.size());
    std::partial_sort(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end(), std::greater<>());
    double s = 0.0;
    for (size_t i = 0; i < k; ++i) s += a[i];
    return s;
  }
  double mmc_bound(uint64_t n) const override { return mmc::topk(n, k_); }

 private:
  uint64_t k_;
};

class KSupportNorm final : public NormDescriptor {
 public:
  explicit KSupportNorm(uint64_t k) : k_(k) {
    if (k < 1) throw ParameterError("k-support norm needs k >= 1");
  }
  std::string name() const override { return "ksupport" + std::to_string(k_); }
  std::string params() const override { return "k=" + std::to_string(k_); }
  double evaluate(const LevelVector& lv) const override { return ksupport_from_runs(lv.runs_descending(), k_); }
  double evaluate_values(std::span<const double> x) const override {
    std::vector<double> a;
    a.reserve(x.size());
    for (double v : x) {
      if (v != 0.0) a.push_back(std::fabs(v));
    }
    std::sort(a.begin(), a.end(), std::greater<>());
    std::vector<std::pair<double, double>> runs;
    for (double v : a) {
      if (!runs.empty() && runs.back().first == v) {
        runs.back().second += 1.0;
      } else {
        runs.emplace_back(v, 1.0);
      }
    }
    return ksupport_from_runs(runs, k_);
  }
  double mmc_bound(uint64_t n) const override { return mmc::ksupport(n, k_); }

 private:
  uint64_t k_;
};

}  // namespace

double ksupport_from_runs(const std::vector<std::pair<double, double>>& runs, uint64_t k) {
  // Sorted entries z_1 >= z_2 >= ... (1-based, zeros implied past the runs).
  // Find r in [0, k-1] with z_{k-r-1} > T_r/(r+1) >= z_{k-r}, T_r = sum_{i >= k-r} z_i;
  // then the norm^2 is sum_{i < k-r} z_i^2 + T_r^2/(r+1).
  std::vector<double> end_idx, pre1, pre2;  // cumulative entry count and sums per run
  double c = 0.0, s1 = 0.0, s2 = 0.0;
  for (const auto& [v, cnt] : runs) {
    c += cnt;
    s1 += v * cnt;
    s2 += v * v * cnt;
    end_idx.push_back(c);
    pre1.push_back(s1);
    pre2.push_back(s2);
  }
  const double total1 = s1;
  if (total1 == 0.0) return 0.0;
  // Entry value and prefix sums for the first i entries.
  auto z_at = [&](double i) -> double {  // i is 1-based
    auto it = std::lower_bound(end_idx.begin(), end_idx.end(), i);
    if (it == end_idx.end()) return 0.0;
    return runs[static_cast<size_t>(it - end_idx.begin())].first;
  };
  auto prefix = [&](double i, bool squares) -> double {
    if (i <= 0.0) return 0.0;
    auto it = std::lower_bound(end_idx.begin(), end_idx.end(), i);
    if (it == end_idx.end()) return squares ? s2 : s1;
    size_t r = static_cast<size_t>(it - end_idx.begin());
    double before = r == 0 ? 0.0 : end_idx[r - 1];
    double base = r == 0 ? 0.0 : (squares ? pre2[r - 1] : pre1[r - 1]);
    double v = runs[r].first;
    return base + (i - before) * (squares ? v * v : v);
  };
  const double kk = static_cast<double>(k);
  for (uint64_t r = 0; r < k; ++r) {
    double head = kk - static_cast<double>(r) - 1.0;  // entries 1..head are kept as is
    double t = total1 - prefix(head, false);
    double hi = head >= 1.0 ? z_at(head) : INFINITY;
    double lo = z_at(head + 1.0);
    double avg = t / static_cast<double>(r + 1);
    if (hi > avg * (1.0 - 1e-13) && avg >= lo * (1.0 - 1e-13)) {
      return std::sqrt(prefix(head, true) + t * t / static_cast<double>(r + 1));
    }
  }
  // Rounding can defeat every test on exact ties; r = k-1 is the remaining case.
  return total1 / std::sqrt(kk);
}

std::unique_ptr<NormDescriptor> make_lp(double p) { return std::make_unique<LpNorm>(p); }
std::unique_ptr<NormDescriptor> make_topk(uint64_t k) { return std::make_unique<TopKNorm>(k); }
std::unique_ptr<NormDescriptor> make_ksupport(uint64_t k) { return std::make_unique<KSupportNorm>(k); }

NormRegistry NormRegistry::with_defaults() {
  NormRegistry reg;
  reg.add("lp", [](const NormParams& p) { return make_lp(p.p); });
  reg.add("topk", [](const NormParams& p) { return make_topk(p.k); });
  reg.add("ksupport", [](const NormParams& p) { return make_ksupport(p.k); });
  return reg;
}

void NormRegistry::add(const std::string& name, Factory f) { factories_[name] = std::move(f); }

std::unique_ptr<NormDescriptor> NormRegistry::create(const std::string& name, const NormParams& params) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) throw ParameterError("unknown norm '" + name + "'");
  return it->second(params);
}

std::vector<std::string> NormRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [n, _] : factories_) out.push_back(n);
  return out;
}

}  // namespace slidenorm
