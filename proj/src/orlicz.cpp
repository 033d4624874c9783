#include "slidenorm/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "slidenorm/errors.hpp"
#include "slidenorm/hashing.hpp"
#include "slidenorm/sensitivity_lp.hpp"

namespace slidenorm {

namespace {

double phi(std::span<const double> x, std::span<const double> w, const GFunction& g, double alpha) {
  double s = 0.0;
  const double inv = 1.0 / alpha;
  if (g.kind == GFunction::Kind::Huber) {
    // Inlined to skip the std::function call per entry.
    const double d = g.param, dd = 0.5 * d * d;
    for (size_t i = 0; i < x.size(); ++i) {
      double t = std::fabs(x[i]) * inv;
      double v = t <= d ? 0.5 * t * t : d * t - dd;
      s += w.empty() ? v : w[i] * v;
    }
    return s - 1.0;
  }
  if (w.empty()) {
    for (double v : x) s += g.value(std::fabs(v) * inv);
  } else {
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * g.value(std::fabs(x[i]) * inv);
  }
  return s - 1.0;
}

}  // namespace

double orlicz_norm_weighted(std::span<const double> x, std::span<const double> w, const GFunction& g,
                            double tol) {
  if (!(tol > 0.0)) throw ParameterError("orlicz_norm: tol must be positive");
  if (!w.empty() && w.size() != x.size()) throw InputError("orlicz_norm: weight count mismatch");
  double s = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError("orlicz_norm: non-finite entry");
    s = std::max(s, std::fabs(v));
  }
  if (s == 0.0) return 0.0;
  if (g.kind == GFunction::Kind::Square || g.kind == GFunction::Kind::Identity) {
    const bool sq = g.kind == GFunction::Kind::Square;
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      double v = sq ? x[i] * x[i] : std::fabs(x[i]);
      acc += w.empty() ? v : w[i] * v;
    }
    return sq ? std::sqrt(acc) : acc;
  }
  double lo, hi;
  if (phi(x, w, g, s) > 0.0) {
    lo = s;
    hi = 2.0 * s;
    int k = 0;
    while (phi(x, w, g, hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++k > 200) throw NumericError("orlicz_norm: failed to bracket the root in 200 doublings");
    }
  } else {
    hi = s;
    lo = 0.5 * s;
    int k = 0;
    while (phi(x, w, g, lo) <= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++k > 200) throw NumericError("orlicz_norm: failed to bracket the root in 200 halvings");
    }
  }
  while (hi - lo > tol * lo) {
    double mid = 0.5 * (lo + hi);
    if (phi(x, w, g, mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double orlicz_norm(std::span<const double> x, const GFunction& g, double tol) {
  return orlicz_norm_weighted(x, std::span<const double>(), g, tol);
}

SampleMatrix::SampleMatrix(size_t d, double span_tol)
    : d_(d), span_tol_(span_tol), rows_(static_cast<Eigen::Index>(d), 0),
      basis_(static_cast<Eigen::Index>(d), 0) {
  if (d < 1) throw ParameterError("SampleMatrix: dimension must be >= 1");
}

bool SampleMatrix::in_span(const Eigen::VectorXd& a) const {
  double na = a.norm();
  if (na == 0.0) return true;
  Eigen::VectorXd r = a - basis_ * (basis_.transpose() * a);
  return r.norm() <= span_tol_ * na;
}

void SampleMatrix::append(const Eigen::VectorXd& v) {
  if (static_cast<size_t>(v.size()) != d_) throw InputError("SampleMatrix: row width mismatch");
  rows_.conservativeResize(Eigen::NoChange, rows_.cols() + 1);
  rows_.col(rows_.cols() - 1) = v;
  double nv = v.norm();
  if (nv == 0.0 || basis_.cols() == static_cast<Eigen::Index>(d_)) return;
  Eigen::VectorXd r = v - basis_ * (basis_.transpose() * v);
  r -= basis_ * (basis_.transpose() * r);
  if (r.norm() > span_tol_ * nv) {
    basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
    basis_.col(basis_.cols() - 1) = r / r.norm();
  }
}

double online_l1_sensitivity(const Eigen::VectorXd& a, const SampleMatrix& m) {
  if (a.norm() == 0.0) return 0.0;
  if (m.rows() == 0 || !m.in_span(a)) return 1.0;
  const Eigen::MatrixXd& q = m.basis();
  Eigen::MatrixXd cols = q.transpose() * m.columns();
  Eigen::VectorXd at = q.transpose() * a;
  double r = l1_support_value(cols, at).value;
  if (!std::isfinite(r)) return 1.0;
  return r / (1.0 + r);
}

double online_sensitivity(const Eigen::VectorXd& a, const SampleMatrix& m, double Delta) {
  if (!(Delta >= 1.0)) throw ParameterError("online_sensitivity: Delta must be >= 1");
  if (a.norm() == 0.0) return 0.0;
  if (m.rows() == 0 || !m.in_span(a)) return 1.0;
  return std::min(1.0, 2.0 * Delta * online_l1_sensitivity(a, m));
}

double sampler_alpha(size_t d, double eps, double C, uint64_t n_bound) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw ParameterError("sampler: eps must lie in (0,1)");
  if (!(C > 0.0)) throw ParameterError("sampler: C must be positive");
  double logn = std::log2(static_cast<double>(std::max<uint64_t>(n_bound, 2)));
  return C * static_cast<double>(d) / (eps * eps) * logn;
}

OnlineSampler::OnlineSampler(size_t d, const SamplerOptions& opt)
    : d_(d), opt_(opt), alpha_(sampler_alpha(d, opt.eps, opt.C, opt.n_bound)), m_(d, opt.span_tol),
      rng_state_(opt.seed) {
  if (!(opt.Delta >= 1.0)) throw ParameterError("sampler: Delta must be >= 1");
}

const CoresetRow* OnlineSampler::add(const Eigen::VectorXd& row, uint64_t index) {
  if (static_cast<size_t>(row.size()) != d_) {
    throw InputError("sampler: row " + std::to_string(index) + " has width " + std::to_string(row.size()) +
                     ", expected " + std::to_string(d_));
  }
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row(i))) throw InputError("sampler: non-finite entry in row " + std::to_string(index));
  }
  ++processed_;
  double ell;
  bool fresh_dir = row.norm() > 0.0 && (m_.rows() == 0 || !m_.in_span(row));
  try {
    ell = online_l1_sensitivity(row, m_);
  } catch (const NumericError& e) {
    throw NumericError(std::string(e.what()) + " (row " + std::to_string(index) + ")");
  }
  sens_sum_ += ell;
  double tau = fresh_dir ? 1.0 : std::min(1.0, 2.0 * opt_.Delta * ell);
  if (tau <= 0.0) return nullptr;
  double p = std::min(1.0, alpha_ * tau);
  // One uniform draw per row keeps the coin sequence tied to arrival order.
  std::mt19937_64 gen(derive_seed(rng_state_, index, 3));
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
  if (p < 1.0 && u >= p) return nullptr;
  m_.append(row / p);
  sample_.push_back({row, index, tau, p, 1.0 / p});
  return &sample_.back();
}

std::vector<CoresetRow> stream_sample(const std::vector<Eigen::VectorXd>& rows, double eps, double Delta,
                                      double C, uint64_t seed) {
  if (rows.empty()) return {};
  SamplerOptions opt;
  opt.eps = eps;
  opt.Delta = Delta;
  opt.C = C;
  opt.n_bound = rows.size();
  opt.seed = seed;
  OnlineSampler s(static_cast<size_t>(rows.front().size()), opt);
  for (size_t i = 0; i < rows.size(); ++i) s.add(rows[i], i + 1);
  return s.sample();
}

WindowCoreset::WindowCoreset(size_t d, const WindowCoresetOptions& opt) : d_(d), opt_(opt) {
  if (opt.window < 1) throw ParameterError("WindowCoreset: window must be >= 1");
  if (opt.sampler.n_bound < 1) throw ParameterError("WindowCoreset: n_bound must be >= 1");
  double logn = std::log2(static_cast<double>(std::max<uint64_t>(opt.sampler.n_bound, 2)));
  inst_eps_ = opt.sampler.eps / logn;
  stagger_ = std::max<uint64_t>(1, static_cast<uint64_t>(std::floor(static_cast<double>(opt.window) / logn)));
  // validates eps, C
  sampler_alpha(d, inst_eps_, opt.sampler.C, opt.sampler.n_bound);
}

size_t WindowCoreset::serving_index() const {
  uint64_t s = window_start();
  size_t idx = 0;
  for (size_t i = 0; i < cps_.size(); ++i) {
    if (cps_[i].start <= s) idx = i;
  }
  return idx;
}

void WindowCoreset::evict() {
  size_t idx = serving_index();
  if (idx > 0) cps_.erase(cps_.begin(), cps_.begin() + static_cast<std::ptrdiff_t>(idx));
}

void WindowCoreset::add(const Eigen::VectorXd& row) {
  if (static_cast<size_t>(row.size()) != d_) {
    throw InputError("WindowCoreset: row " + std::to_string(t_ + 1) + " has width " +
                     std::to_string(row.size()) + ", expected " + std::to_string(d_));
  }
  ++t_;
  bool open = cps_.empty() || t_ - last_cp_ >= stagger_;
  if (!open) {
    size_t cur = cps_[serving_index()].sampler.sample().size();
    open = cur >= 2 * std::max<size_t>(serving_at_last_cp_, d_);
  }
  if (open) {
    SamplerOptions so = opt_.sampler;
    so.eps = inst_eps_;
    so.seed = derive_seed(opt_.sampler.seed, t_, 11);
    cps_.push_back({t_, OnlineSampler(d_, so)});
    last_cp_ = t_;
  }
  for (auto& cp : cps_) cp.sampler.add(row, t_);
  evict();
  if (open) serving_at_last_cp_ = cps_[serving_index()].sampler.sample().size();
  max_cps_ = std::max(max_cps_, cps_.size());
}

std::vector<CoresetRow> WindowCoreset::query() const {
  std::vector<CoresetRow> out;
  if (cps_.empty()) return out;
  uint64_t s = window_start();
  for (const auto& r : cps_[serving_index()].sampler.sample()) {
    if (r.index >= s) out.push_back(r);
  }
  return out;
}

size_t WindowCoreset::stored_rows() const {
  size_t total = 0;
  for (const auto& cp : cps_) total += cp.sampler.sample().size();
  return total;
}

std::vector<uint64_t> WindowCoreset::checkpoint_starts() const {
  std::vector<uint64_t> out;
  for (const auto& cp : cps_) out.push_back(cp.start);
  return out;
}

std::vector<CoresetRow> window_coreset(const std::vector<Eigen::VectorXd>& rows, uint64_t W, double eps,
                                       double Delta, double C, uint64_t seed) {
  if (rows.empty()) return {};
  WindowCoresetOptions opt;
  opt.window = W;
  opt.sampler.eps = eps;
  opt.sampler.Delta = Delta;
  opt.sampler.C = C;
  opt.sampler.n_bound = rows.size();
  opt.sampler.seed = seed;
  WindowCoreset wc(static_cast<size_t>(rows.front().size()), opt);
  for (const auto& r : rows) wc.add(r);
  return wc.query();
}

namespace {

Eigen::MatrixXd stack(const std::vector<CoresetRow>& rows, Eigen::VectorXd* w) {
  if (rows.empty()) return {};
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), rows.front().row.size());
  if (w) w->resize(a.rows());
  for (size_t i = 0; i < rows.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = rows[i].row.transpose();
    if (w) (*w)(static_cast<Eigen::Index>(i)) = rows[i].weight;
  }
  return a;
}

Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return a;
}

double wnorm(const Eigen::VectorXd& v, const Eigen::VectorXd* w, const GFunction& g, double tol) {
  std::span<const double> xs(v.data(), static_cast<size_t>(v.size()));
  if (!w) return orlicz_norm(xs, g, tol);
  return orlicz_norm_weighted(xs, std::span<const double>(w->data(), static_cast<size_t>(w->size())), g, tol);
}

}  // namespace

double coreset_norm(const std::vector<CoresetRow>& rows, const Eigen::VectorXd& x, const GFunction& g,
                    double tol) {
  if (rows.empty()) return 0.0;
  Eigen::VectorXd w;
  Eigen::MatrixXd a = stack(rows, &w);
  if (a.cols() != x.size()) throw InputError("coreset_norm: direction width mismatch");
  Eigen::VectorXd v = a * x;
  return wnorm(v, &w, g, tol);
}

double dense_norm(const std::vector<Eigen::VectorXd>& rows, const Eigen::VectorXd& x, const GFunction& g,
                  double tol) {
  if (rows.empty()) return 0.0;
  Eigen::MatrixXd a = stack(rows);
  if (a.cols() != x.size()) throw InputError("dense_norm: direction width mismatch");
  Eigen::VectorXd v = a * x;
  return wnorm(v, nullptr, g, tol);
}

std::vector<double> embedding_ratios(const std::vector<CoresetRow>& coreset,
                                     const std::vector<Eigen::VectorXd>& rows,
                                     const std::vector<Eigen::VectorXd>& directions, const GFunction& g,
                                     bool parallel) {
  std::vector<double> out(directions.size(), 0.0);
  if (rows.empty() || directions.empty()) return out;
  Eigen::VectorXd w;
  Eigen::MatrixXd mc = stack(coreset, &w);
  Eigen::MatrixXd a = stack(rows);
  for (const auto& x : directions) {
    if (x.size() != a.cols()) throw InputError("embedding_ratios: direction width mismatch");
  }
  const long nd = static_cast<long>(directions.size());
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (long i = 0; i < nd; ++i) {
    const Eigen::VectorXd& x = directions[static_cast<size_t>(i)];
    Eigen::VectorXd ax = a * x;
    double den = wnorm(ax, nullptr, g, 1e-9);
    double num = 0.0;
    if (mc.rows() > 0) {
      Eigen::VectorXd mx = mc * x;
      num = wnorm(mx, &w, g, 1e-9);
    }
    out[static_cast<size_t>(i)] = den > 0.0 ? num / den : (num > 0.0 ? INFINITY : 1.0);
  }
  return out;
}

double regression_objective(const std::vector<CoresetRow>& rows, const Eigen::VectorXd& x, const GFunction& g,
                            double tol) {
  if (rows.empty()) return 0.0;
  Eigen::VectorXd w;
  Eigen::MatrixXd m = stack(rows, &w);
  const Eigen::Index d = m.cols() - 1;
  if (x.size() != d) throw InputError("regression_objective: x width mismatch");
  Eigen::VectorXd r = m.leftCols(d) * x - m.col(d);
  return wnorm(r, &w, g, tol);
}

std::vector<CoresetRow> as_unit_rows(const std::vector<Eigen::VectorXd>& rows) {
  std::vector<CoresetRow> out;
  out.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out.push_back({rows[i], i + 1, 1.0, 1.0, 1.0});
  return out;
}

RegressionResult solve_regression(const std::vector<CoresetRow>& coreset, const GFunction& g, double eps_opt,
                                  int max_iter, std::optional<Eigen::VectorXd> x0) {
  if (coreset.empty()) throw InputError("solve_regression: empty coreset");
  if (coreset.front().row.size() < 2) throw InputError("solve_regression: rows need a response column");
  Eigen::VectorXd w;
  Eigen::MatrixXd m = stack(coreset, &w);
  const Eigen::Index d = m.cols() - 1;
  Eigen::MatrixXd a = m.leftCols(d);
  Eigen::VectorXd b = m.col(d);
  std::span<const double> ws(w.data(), static_cast<size_t>(w.size()));
  const double tol = 1e-12;

  auto objective = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r = a * x - b;
    return orlicz_norm_weighted(std::span<const double>(r.data(), static_cast<size_t>(r.size())), ws, g, tol);
  };
  // d alpha / d r_j = w_j G'(u_j) sgn(r_j) / sum_k w_k G'(u_k) u_k, u = |r| / alpha
  auto gradient = [&](const Eigen::VectorXd& x, double alpha) {
    Eigen::VectorXd r = a * x - b;
    Eigen::VectorXd gr(r.size());
    double den = 0.0;
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      double u = std::fabs(r(j)) / alpha;
      double gp = g.has_derivative() ? g.derivative(u) : 0.0;
      gr(j) = w(j) * gp * (r(j) > 0 ? 1.0 : (r(j) < 0 ? -1.0 : 0.0));
      den += w(j) * gp * u;
    }
    if (den > 0.0) gr /= den;
    return Eigen::VectorXd(a.transpose() * gr);
  };

  RegressionResult res;
  if (x0) {
    if (x0->size() != d) throw InputError("solve_regression: x0 width mismatch");
    res.x = *x0;
  } else {
    Eigen::VectorXd sw = w.cwiseSqrt();
    res.x = (sw.asDiagonal() * a).colPivHouseholderQr().solve(sw.asDiagonal() * b);
  }
  double f = objective(res.x);
  if (!g.has_derivative()) {
    res.objective = f;
    return res;
  }
  // Quasi-Newton with Armijo backtracking; resets to steepest descent when
  // the BFGS direction fails to descend.
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd gx = gradient(res.x, f);
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    if (f == 0.0 || gx.norm() <= 1e-14 * std::max(1.0, f)) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd dir = -h * gx;
    if (dir.dot(gx) >= 0.0) {
      h.setIdentity();
      dir = -gx;
    }
    double step = 1.0;
    if (it == 0 || h.isIdentity()) step = f / std::max(gx.norm(), 1e-300) * 0.1;
    Eigen::VectorXd xn;
    double fn = f;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = res.x + step * dir;
      fn = objective(xn);
      if (fn <= f + 1e-4 * step * dir.dot(gx)) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) {
      if (h.isIdentity()) {
        res.converged = true;  // no descent possible at this resolution
        break;
      }
      h.setIdentity();
      continue;
    }
    Eigen::VectorXd gn = gradient(xn, fn);
    Eigen::VectorXd sv = xn - res.x, yv = gn - gx;
    double sy = sv.dot(yv);
    if (sy > 1e-16) {
      double rho = 1.0 / sy;
      Eigen::MatrixXd i = Eigen::MatrixXd::Identity(d, d);
      h = (i - rho * sv * yv.transpose()) * h * (i - rho * yv * sv.transpose()) + rho * sv * sv.transpose();
    }
    double rel = (f - fn) / std::max(f, 1e-300);
    res.x = xn;
    f = fn;
    gx = gn;
    if (rel < eps_opt) {
      if (++stall >= 3) {
        res.converged = true;
        break;
      }
    } else {
      stall = 0;
    }
  }
  res.objective = f;
  return res;
}

}  // namespace slidenorm
