#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "slidenorm/gfunction.hpp"

namespace slidenorm {

// Unique alpha with sum_i G(|x_i| / alpha) = 1. Closed form for square and
// identity, otherwise bracketing and bisection.
double orlicz_norm(std::span<const double> x, const GFunction& g, double tol = 1e-10);
// Same with per-entry weights: sum_i w_i G(|x_i| / alpha) = 1.
double orlicz_norm_weighted(std::span<const double> x, std::span<const double> w, const GFunction& g,
                            double tol = 1e-10);

struct CoresetRow {
  Eigen::VectorXd row;  // original row (response last when carried)
  uint64_t index = 0;   // 1-based arrival index
  double tau = 1.0;
  double p = 1.0;
  double weight = 1.0;  // 1/p
};

// Current weighted sample matrix M (rows a_j / p_j) with an orthonormal basis
// of its row span.
class SampleMatrix {
 public:
  explicit SampleMatrix(size_t d, double span_tol = 1e-9);

  size_t dim() const { return d_; }
  size_t rows() const { return static_cast<size_t>(rows_.cols()); }
  size_t rank() const { return static_cast<size_t>(basis_.cols()); }
  bool in_span(const Eigen::VectorXd& a) const;
  void append(const Eigen::VectorXd& scaled_row);
  // Columns are the stored rows.
  const Eigen::MatrixXd& columns() const { return rows_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

 private:
  size_t d_;
  double span_tol_;
  Eigen::MatrixXd rows_;   // d x k
  Eigen::MatrixXd basis_;  // d x rank, orthonormal
};

// max_{x} |<a,x>| / (||Mx||_1 + |<a,x>|); 1 when a leaves span(M), 0 for a = 0.
double online_l1_sensitivity(const Eigen::VectorXd& a, const SampleMatrix& m);
// min(1, 2 Delta * online_l1_sensitivity) with the out-of-span rule.
double online_sensitivity(const Eigen::VectorXd& a, const SampleMatrix& m, double Delta);

struct SamplerOptions {
  double eps = 0.25;
  double Delta = 1.0;
  double C = 1.0;        // oversampling constant in alpha = C d / eps^2 log n
  uint64_t n_bound = 0;  // stream length bound used in log n
  uint64_t seed = 1;
  double span_tol = 1e-9;
};

// One-pass online sensitivity sampler.
class OnlineSampler {
 public:
  OnlineSampler(size_t d, const SamplerOptions& opt);

  // Returns the sampled row, if any. Throws InputError on a width mismatch.
  const CoresetRow* add(const Eigen::VectorXd& row, uint64_t index);

  const std::vector<CoresetRow>& sample() const { return sample_; }
  double alpha() const { return alpha_; }
  uint64_t processed() const { return processed_; }
  size_t dim() const { return d_; }
  // Sum of the unscaled online L1 sensitivities of processed rows w.r.t. M.
  double sensitivity_sum() const { return sens_sum_; }

 private:
  size_t d_;
  SamplerOptions opt_;
  double alpha_;
  SampleMatrix m_;
  std::vector<CoresetRow> sample_;
  uint64_t processed_ = 0;
  uint64_t rng_state_;
  double sens_sum_ = 0.0;
};

double sampler_alpha(size_t d, double eps, double C, uint64_t n_bound);

std::vector<CoresetRow> stream_sample(const std::vector<Eigen::VectorXd>& rows, double eps, double Delta,
                                      double C, uint64_t seed);

struct WindowCoresetOptions {
  uint64_t window = 1;
  SamplerOptions sampler;  // eps here is the target; instances run at eps / log2 n
};

// Staggered online samplers over checkpoints for the last-W-rows matrix.
class WindowCoreset {
 public:
  WindowCoreset(size_t d, const WindowCoresetOptions& opt);

  void add(const Eigen::VectorXd& row);
  // Coreset of the youngest checkpoint at or before the window start,
  // restricted to in-window rows.
  std::vector<CoresetRow> query() const;

  size_t checkpoint_count() const { return cps_.size(); }
  size_t max_checkpoints() const { return max_cps_; }
  size_t stored_rows() const;
  uint64_t processed() const { return t_; }
  double instance_eps() const { return inst_eps_; }
  std::vector<uint64_t> checkpoint_starts() const;

 private:
  struct Checkpoint {
    uint64_t start;
    OnlineSampler sampler;
  };
  uint64_t window_start() const { return t_ >= opt_.window ? t_ - opt_.window + 1 : 1; }
  size_t serving_index() const;
  void evict();

  size_t d_;
  WindowCoresetOptions opt_;
  double inst_eps_;
  uint64_t stagger_;
  uint64_t t_ = 0;
  uint64_t last_cp_ = 0;
  size_t serving_at_last_cp_ = 0;
  size_t max_cps_ = 0;
  std::vector<Checkpoint> cps_;
};

std::vector<CoresetRow> window_coreset(const std::vector<Eigen::VectorXd>& rows, uint64_t W, double eps,
                                       double Delta, double C, uint64_t seed);

// Weighted G-norm of the projections <a_j, x> over a coreset.
double coreset_norm(const std::vector<CoresetRow>& rows, const Eigen::VectorXd& x, const GFunction& g,
                    double tol = 1e-8);
// G-norm of A x for a dense row set.
double dense_norm(const std::vector<Eigen::VectorXd>& rows, const Eigen::VectorXd& x, const GFunction& g,
                  double tol = 1e-8);

// Ratios ||Mx||_G / ||Ax||_G over probe directions; parallel and serial paths.
std::vector<double> embedding_ratios(const std::vector<CoresetRow>& coreset,
                                     const std::vector<Eigen::VectorXd>& rows,
                                     const std::vector<Eigen::VectorXd>& directions, const GFunction& g,
                                     bool parallel = true);

struct RegressionResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimizes ||M' x - b'||_G over a weighted coreset whose rows carry the
// response as their last entry.
RegressionResult solve_regression(const std::vector<CoresetRow>& coreset, const GFunction& g,
                                  double eps_opt = 1e-8, int max_iter = 5000,
                                  std::optional<Eigen::VectorXd> x0 = std::nullopt);

// Objective ||A x - b||_G with weights (rows carry the response last).
double regression_objective(const std::vector<CoresetRow>& rows, const Eigen::VectorXd& x, const GFunction& g,
                            double tol = 1e-10);

// Unit-weight CoresetRow view of a dense row set.
std::vector<CoresetRow> as_unit_rows(const std::vector<Eigen::VectorXd>& rows);

}  // namespace slidenorm
