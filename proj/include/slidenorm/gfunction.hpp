#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace slidenorm {

// Orlicz loss G on [0, inf): G(0)=0, strictly increasing, convex, and
// G(y)/G(x) <= C_G (y/x)^2 for 0 < x < y.
struct GFunction {
  // Known shapes get closed-form or inlined norm evaluation.
  enum class Kind { Generic, Square, Identity, Huber };
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;  // may be empty
  double growth = 1.0;                       // C_G
  Kind kind = Kind::Generic;
  double param = 0.0;  // Huber delta

  double operator()(double x) const { return value(x); }
  bool has_derivative() const { return static_cast<bool>(derivative); }
};

GFunction g_square();
GFunction g_identity();
// t^2/2 for t <= delta, delta (t - delta/2) above.
GFunction g_huber(double delta = 1.0);
GFunction g_by_name(const std::string& name);

// Sampled checks of the GFunction assumptions on a log-spaced grid.
bool g_is_increasing_convex(const GFunction& g, double lo = 1e-3, double hi = 1e3, int points = 400);
bool g_growth_holds(const GFunction& g, double lo = 1e-3, double hi = 1e3, int points = 60);

// Distortion ratio G(d1) d2 / (G(d2) d1), floored at 1.
double delta_ratio(const GFunction& g, double d1, double d2);

}  // namespace slidenorm
