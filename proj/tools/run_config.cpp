#include "run_config.hpp"

#include <cstdlib>
#include <set>

#include "slidenorm/errors.hpp"

namespace slidenorm::cli {

void RunConfig::validate() const {
  static const std::set<std::string> subs{"gen", "run"}, targets{"hh", "norm", "orlicz"},
      variants{"appendix-c", "zipf", "uniform", "gaussian"}, modes{"provable", "practical"};
  if (!subs.count(subcommand)) throw ParameterError("subcommand must be gen or run, got '" + subcommand + "'");
  if (subcommand == "run" && !targets.count(target)) {
    throw ParameterError("run target must be hh, norm or orlicz, got '" + target + "'");
  }
  if (!variants.count(variant)) throw ParameterError("unknown variant '" + variant + "'");
  if (!modes.count(mode)) throw ParameterError("mode must be provable or practical, got '" + mode + "'");
  if (m < 1) throw ParameterError("--m must be >= 1");
  if (n < 1) throw ParameterError("--n must be >= 1");
  if (d < 1) throw ParameterError("--d must be >= 1");
  if (reps < 1) throw ParameterError("--reps must be >= 1");
  if (!(eps > 0.0) || !(eps < 1.0)) throw ParameterError("--eps must lie in (0,1)");
  if (!(eta > 0.0) || !(eta < 1.0)) throw ParameterError("--eta must lie in (0,1)");
  if (!(nu > 0.0) || !(nu < 0.25)) throw ParameterError("--nu must lie in (0,1/4)");
  if (!(p >= 1.0)) throw ParameterError("--p must be >= 1");
  if (k < 1) throw ParameterError("--k must be >= 1");
  if (!(C > 0.0)) throw ParameterError("--C must be positive");
  for (double r : rates) {
    if (!(r > 0.0) || !(r <= 1.0)) throw ParameterError("--rate values must lie in (0,1]");
  }
}

nlohmann::json to_json(const RunConfig& c) {
  return nlohmann::json{{"subcommand", c.subcommand}, {"target", c.target},   {"in", c.in},
                        {"out", c.out},               {"diag", c.diag},       {"coreset", c.coreset},
                        {"variant", c.variant},       {"m", c.m},             {"n", c.n},
                        {"d", c.d},                   {"response", c.response}, {"s", c.s},
                        {"W", c.W},                   {"eps", c.eps},         {"eta", c.eta},
                        {"nu", c.nu},                 {"norm", c.norm},       {"p", c.p},
                        {"k", c.k},                   {"mode", c.mode},       {"R", c.R},
                        {"g", c.g},                   {"C", c.C},             {"seed", c.seed},
                        {"reps", c.reps},             {"rates", c.rates}};
}

RunConfig from_json(const nlohmann::json& j) {
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  try {
    get("subcommand", c.subcommand);
    get("target", c.target);
    get("in", c.in);
    get("out", c.out);
    get("diag", c.diag);
    get("coreset", c.coreset);
    get("variant", c.variant);
    get("m", c.m);
    get("n", c.n);
    get("d", c.d);
    get("response", c.response);
    get("s", c.s);
    get("W", c.W);
    get("eps", c.eps);
    get("eta", c.eta);
    get("nu", c.nu);
    get("norm", c.norm);
    get("p", c.p);
    get("k", c.k);
    get("mode", c.mode);
    get("R", c.R);
    get("g", c.g);
    get("C", c.C);
    get("seed", c.seed);
    get("reps", c.reps);
    get("rates", c.rates);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  return c;
}

uint64_t default_seed(uint64_t fallback) {
  const char* v = std::getenv("SLIDENORM_SEED");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  unsigned long long s = std::strtoull(v, &end, 10);
  if (end == v || *end != '\0') return fallback;
  return static_cast<uint64_t>(s);
}

}  // namespace slidenorm::cli
