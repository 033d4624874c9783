#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace slidenorm::cli {

// Everything one CLI invocation needs; round-trips through JSON.
struct RunConfig {
  std::string subcommand = "run";  // gen | run
  std::string target;              // hh | norm | orlicz (run only)
  std::string in;
  std::string out;
  std::string diag;      // hh diagnostics (key=value)
  std::string coreset;   // orlicz coreset dump

  // generation
  std::string variant = "appendix-c";  // appendix-c | zipf | uniform | gaussian
  uint64_t m = 1024;
  uint64_t n = 65536;
  uint64_t d = 4;
  bool response = false;
  double s = 1.1;  // Zipf exponent

  // estimation
  uint64_t W = 0;  // 0 = whole stream
  double eps = 0.2;
  double eta = 0.1;
  double nu = 0.2;
  std::string norm = "lp";
  double p = 2.0;
  uint64_t k = 1;
  std::string mode = "practical";
  uint64_t R = 0;  // practical repetition override, 0 = default clip
  std::string g = "square";
  double C = 1.0;

  uint64_t seed = 1;
  uint64_t reps = 1;
  std::vector<double> rates{0.1};

  // Throws slidenorm::ParameterError with the offending field.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig from_json(const nlohmann::json& j);

// SLIDENORM_SEED when set and parsable, else fallback.
uint64_t default_seed(uint64_t fallback = 1);

}  // namespace slidenorm::cli
