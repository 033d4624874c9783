#include "slidenorm/gfunction.hpp"

#include <algorithm>
#include <cmath>

#include "slidenorm/errors.hpp"

namespace slidenorm {

GFunction g_square() {
  return {"square", [](double t) { return t * t; }, [](double t) { return 2.0 * t; }, 1.0,
          GFunction::Kind::Square};
}

GFunction g_identity() {
  return {"identity", [](double t) { return t; }, [](double) { return 1.0; }, 1.0,
          GFunction::Kind::Identity};
}

GFunction g_huber(double delta) {
  if (!(delta > 0.0)) throw ParameterError("Huber G needs delta > 0");
  return {"huber",
          [delta](double t) { return t <= delta ? 0.5 * t * t : delta * (t - 0.5 * delta); },
          [delta](double t) { return t <= delta ? t : delta; }, 1.0, GFunction::Kind::Huber, delta};
}

GFunction g_by_name(const std::string& name) {
  if (name == "square") return g_square();
  if (name == "identity") return g_identity();
  if (name == "huber") return g_huber();
  throw ParameterError("unknown G function '" + name + "'");
}

bool g_is_increasing_convex(const GFunction& g, double lo, double hi, int points) {
  if (g(0.0) != 0.0) return false;
  std::vector<double> xs(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  double prev = 0.0;
  for (double x : xs) {
    double v = g(x);
    if (!(v > prev)) return false;
    prev = v;
  }
  // Midpoint convexity on neighbouring grid pairs.
  for (int i = 0; i + 1 < points; ++i) {
    double a = xs[i], b = xs[i + 1];
    if (g(0.5 * (a + b)) > 0.5 * (g(a) + g(b)) * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

bool g_growth_holds(const GFunction& g, double lo, double hi, int points) {
  for (int i = 0; i < points; ++i) {
    double x = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    for (int j = i + 1; j < points; ++j) {
      double y = lo * std::pow(hi / lo, static_cast<double>(j) / (points - 1));
      if (g(y) / g(x) > g.growth * (y / x) * (y / x) * (1.0 + 1e-9)) return false;
    }
  }
  return true;
}

double delta_ratio(const GFunction& g, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > d1)) throw ParameterError("delta_ratio needs 0 < d1 < d2");
  return std::max(1.0, g(d1) * d2 / (g(d2) * d1));
}

}  // namespace slidenorm
