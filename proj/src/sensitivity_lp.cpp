#include "slidenorm/sensitivity_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "slidenorm/errors.hpp"

namespace slidenorm {

L1SupportResult l1_support_simplex(const Eigen::MatrixXd& cols_in, const Eigen::VectorXd& a_in) {
  const int d = static_cast<int>(cols_in.rows());
  const int k = static_cast<int>(cols_in.cols());
  if (d == 0 || k < d) throw NumericError("l1_support_value: need at least d columns");
  double scale = cols_in.colwise().norm().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericError("l1_support_value: degenerate columns");
  const Eigen::MatrixXd cols = cols_in / scale;
  const Eigen::VectorXd a = a_in / scale;

  // Variables: z+_j (0..k-1), z-_j (k..2k-1), lambda (2k).
  const int nv = 2 * k + 1;
  const int lam = 2 * k;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto column = [&](int j) -> Eigen::VectorXd {
    if (j < k) return cols.col(j);
    if (j < 2 * k) return -cols.col(j - k);
    return -a;
  };
  auto upper = [&](int j) { return j == lam ? kInf : 1.0; };

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cols);
  qr.setThreshold(1e-10);
  if (qr.rank() < d) throw NumericError("l1_support_value: columns do not span the space");
  std::vector<int> basis(static_cast<size_t>(d));
  std::vector<int> pos(static_cast<size_t>(nv), -1);
  for (int i = 0; i < d; ++i) {
    basis[i] = qr.colsPermutation().indices()[i];
    pos[basis[i]] = i;
  }
  std::vector<double> x(static_cast<size_t>(nv), 0.0);
  std::vector<char> at_upper(static_cast<size_t>(nv), 0);

  const double tol = 1e-11;
  int degenerate = 0;
  const int max_iter = 50 * (nv + d) + 1000;
  Eigen::MatrixXd B(d, d);
  Eigen::VectorXd cb(d), pi(d), delta(d);
  std::vector<std::pair<double, int>> cand;
  int it = 0;
  while (it < max_iter) {
    for (int i = 0; i < d; ++i) {
      B.col(i) = column(basis[i]);
      cb(i) = basis[i] == lam ? 1.0 : 0.0;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    pi = B.transpose().partialPivLu().solve(cb);
    const Eigen::VectorXd proj = cols.transpose() * pi;  // pi . m_j
    const double pa = pi.dot(a);
    const bool bland = degenerate > 30;
    auto reduced = [&](int j) { return (j < k) ? -proj(j) : (j < 2 * k) ? proj(j - k) : 1.0 + pa; };
    // Reduced costs only move on a basis change, so every eligible column is
    // priced once and bound flips are applied in Dantzig (or Bland) order.
    cand.clear();
    for (int j = 0; j < nv; ++j) {
      if (pos[j] >= 0) continue;
      double dj = reduced(j);
      if (at_upper[j] ? (dj < -tol) : (dj > tol)) cand.emplace_back(bland ? j : -std::fabs(dj), j);
    }
    if (cand.empty()) {
      double lambda = pos[lam] >= 0 ? x[lam] : (at_upper[lam] ? kInf : 0.0);
      L1SupportResult res;
      res.iterations = it;
      res.value = lambda > 0.0 ? 1.0 / lambda : kInf;
      return res;
    }
    std::sort(cand.begin(), cand.end());
    for (const auto& [key, q] : cand) {
      if (++it > max_iter) break;
      const double dq = reduced(q);
      const double s = dq > 0 ? 1.0 : -1.0;
      delta = lu.solve(column(q));
      double theta = upper(q);  // bound flip distance
      int leave = -1;
      double leave_mag = 0.0;
      for (int i = 0; i < d; ++i) {
        double g = s * delta(i);
        int bj = basis[i];
        double lim;
        if (g > tol) {
          lim = x[bj] / g;
        } else if (g < -tol) {
          double u = upper(bj);
          if (u == kInf) continue;
          lim = (u - x[bj]) / (-g);
        } else {
          continue;
        }
        lim = std::max(lim, 0.0);
        bool take = lim < theta - 1e-15;
        if (!take && std::fabs(lim - theta) <= 1e-15 && leave >= 0) {
          take = bland ? bj < basis[leave] : std::fabs(g) > leave_mag;
        }
        if (take) {
          theta = lim;
          leave = i;
          leave_mag = std::fabs(g);
        }
      }
      if (theta == kInf) throw NumericError("l1_support_value: LP is unbounded");
      x[q] += s * theta;
      for (int i = 0; i < d; ++i) x[basis[i]] -= theta * s * delta(i);
      if (leave < 0) {
        at_upper[q] = s > 0 ? 1 : 0;
        x[q] = s > 0 ? upper(q) : 0.0;
        continue;
      }
      degenerate = theta < 1e-14 ? degenerate + 1 : 0;
      int out = basis[leave];
      double g = s * delta(leave);
      if (g > 0) {
        x[out] = 0.0;
        at_upper[out] = 0;
      } else {
        x[out] = upper(out);
        at_upper[out] = 1;
      }
      pos[out] = -1;
      basis[leave] = q;
      pos[q] = leave;
      at_upper[q] = 0;
      break;
    }
  }
  throw NumericError("l1_support_value: iteration limit reached");
}

namespace {

// Walks vertices of min ||c + G y||_1 (each pinned by q = cols(G) zero
// residuals in S) until subgradient multipliers on S certify optimality.
// Returns false on degeneracy so the caller can fall back.
bool lad_vertex_walk(const Eigen::MatrixXd& G, const Eigen::VectorXd& c, std::vector<int> S, double& objective,
                     int& steps) {
  const int q = static_cast<int>(G.cols());
  const Eigen::Index k = G.rows();
  const double zero = 1e-12 * (c.cwiseAbs().maxCoeff() + 1e-300);
  std::vector<char> in_s(static_cast<size_t>(k), 0);
  for (int j : S) in_s[j] = 1;
  Eigen::MatrixXd GS(q, q);
  Eigen::VectorXd cS(q), r(k), h(k);
  std::vector<std::pair<double, Eigen::Index>> bps;
  for (steps = 1; steps <= 200 + 2 * static_cast<int>(k); ++steps) {
    for (int i = 0; i < q; ++i) {
      GS.row(i) = G.row(S[i]);
      cS(i) = c(S[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(GS);
    if (lu.rank() < q) return false;
    r = c + G * lu.solve(-cS);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(q);
    for (Eigen::Index j = 0; j < k; ++j)
      if (!in_s[j] && std::fabs(r(j)) > zero) g += (r(j) > 0 ? 1.0 : -1.0) * G.row(j).transpose();
    Eigen::VectorXd u = lu.transpose().solve(-g);
    if (!u.allFinite()) return false;
    Eigen::Index out;
    double umax = u.cwiseAbs().maxCoeff(&out);
    if (umax <= 1.0 + 1e-9) {
      objective = r.cwiseAbs().sum();
      return true;
    }
    // Release constraint `out`; along v the other pinned residuals stay zero.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(q);
    e(out) = u(out) > 0 ? 1.0 : -1.0;
    h = G * lu.solve(e);
    double slope = 1.0;
    bps.clear();
    for (Eigen::Index j = 0; j < k; ++j) {
      if (in_s[j]) continue;
      if (std::fabs(r(j)) <= zero) {
        slope += std::fabs(h(j));
        continue;
      }
      slope += (r(j) > 0 ? 1.0 : -1.0) * h(j);
      double t = -r(j) / h(j);
      if (h(j) != 0.0 && t > 0.0) bps.emplace_back(t, j);
    }
    if (slope >= 0.0 || bps.empty()) return false;
    std::sort(bps.begin(), bps.end());
    Eigen::Index enter = -1;
    for (const auto& [t, j] : bps) {
      slope += 2.0 * std::fabs(h(j));
      if (slope >= 0.0) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return false;
    in_s[S[out]] = 0;
    S[out] = static_cast<int>(enter);
    in_s[enter] = 1;
  }
  return false;
}

}  // namespace

L1SupportResult l1_support_value(const Eigen::MatrixXd& cols_in, const Eigen::VectorXd& a_in) {
  const int d = static_cast<int>(cols_in.rows());
  const int k = static_cast<int>(cols_in.cols());
  if (d == 0 || k < d) throw NumericError("l1_support_value: need at least d columns");
  double scale = cols_in.colwise().norm().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericError("l1_support_value: degenerate columns");
  const Eigen::MatrixXd cols = cols_in / scale;
  const Eigen::VectorXd a = a_in / scale;
  const double na2 = a.squaredNorm();
  if (!(na2 > 0.0)) throw NumericError("l1_support_value: zero objective vector");

  // value = 1 / min ||M^T x||_1 over a^T x = 1; x = x0 + N y turns this into
  // an L1 regression in d-1 unknowns.
  const Eigen::VectorXd x0 = a / na2;
  const Eigen::VectorXd c = cols.transpose() * x0;
  L1SupportResult res;
  if (d == 1) {
    res.value = 1.0 / c.cwiseAbs().sum();
    return res;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> hq(a);
  Eigen::MatrixXd Q = hq.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd N = Q.rightCols(d - 1);
  const Eigen::MatrixXd G = cols.transpose() * N;  // k x (d-1)
  const int q = d - 1;

  // A few IRLS steps move toward the optimum; the q smallest residuals then
  // seed the vertex walk.
  Eigen::VectorXd y = G.colPivHouseholderQr().solve(-c);
  Eigen::VectorXd r(k), w(k);
  for (int it = 0; it < 6; ++it) {
    r = c + G * y;
    const double floor = 1e-9 * r.cwiseAbs().mean() + 1e-300;
    for (int j = 0; j < k; ++j) w(j) = 1.0 / std::max(std::fabs(r(j)), floor);
    Eigen::MatrixXd H = G.transpose() * w.asDiagonal() * G;
    Eigen::VectorXd yn = H.ldlt().solve(-(G.transpose() * w.cwiseProduct(c)));
    if (!yn.allFinite()) break;
    y = yn;
  }
  r = c + G * y;
  std::vector<int> idx(static_cast<size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  std::nth_element(idx.begin(), idx.begin() + (q - 1), idx.end(),
                   [&](int i, int j) { return std::fabs(r(i)) < std::fabs(r(j)); });
  double f = 0.0;
  int steps = 0;
  if (lad_vertex_walk(G, c, std::vector<int>(idx.begin(), idx.begin() + q), f, steps) && f > 0.0) {
    res.value = 1.0 / f;
    res.iterations = steps;
    return res;
  }
  L1SupportResult fb = l1_support_simplex(cols_in, a_in);
  fb.iterations += 1000000;  // marks the simplex fallback
  return fb;
}

}  // namespace slidenorm
