#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slidenorm/levels.hpp"

namespace slidenorm {

// A symmetric norm evaluated on level vectors and on plain magnitude vectors.
class NormDescriptor {
 public:
  virtual ~NormDescriptor() = default;
  virtual std::string name() const = 0;
  virtual double evaluate(const LevelVector& levels) const = 0;
  virtual double evaluate_values(std::span<const double> x) const = 0;
  virtual double mmc_bound(uint64_t n) const = 0;
  // CSV-style parameter text, e.g. "p=3" or "k=64".
  virtual std::string params() const = 0;
  // p for L_p norms; empty otherwise.
  virtual std::optional<double> lp_exponent() const { return std::nullopt; }
};

namespace mmc {
double qprime(uint64_t n);           // O(log n)
double lp(uint64_t n, double p);     // log n for p <= 2, n^(1/2-1/p) above
double topk(uint64_t n, uint64_t k); // sqrt(n/k)
double ksupport(uint64_t n, uint64_t k);
double box(uint64_t n);
}  // namespace mmc

std::unique_ptr<NormDescriptor> make_lp(double p);
std::unique_ptr<NormDescriptor> make_topk(uint64_t k);
std::unique_ptr<NormDescriptor> make_ksupport(uint64_t k);

// k-support norm of a descending run-length vector (value, count), zeros implied.
double ksupport_from_runs(const std::vector<std::pair<double, double>>& runs, uint64_t k);

struct NormParams {
  double p = 2.0;
  uint64_t k = 1;
};

// name -> factory. Ships "lp", "topk" and "ksupport".
class NormRegistry {
 public:
  using Factory = std::function<std::unique_ptr<NormDescriptor>(const NormParams&)>;

  static NormRegistry with_defaults();
  void add(const std::string& name, Factory f);
  std::unique_ptr<NormDescriptor> create(const std::string& name, const NormParams& params) const;
  std::vector<std::string> names() const;
  bool contains(const std::string& name) const { return factories_.count(name) > 0; }

 private:
  std::map<std::string, Factory> factories_;
};

}  // namespace slidenorm
