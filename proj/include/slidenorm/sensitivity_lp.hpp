#pragma once

#include <Eigen/Dense>

namespace slidenorm {

struct L1SupportResult {
  double value = 0.0;  // max a^T x subject to sum_j |m_j^T x| <= 1
  int iterations = 0;
};

// max a^T x subject to sum_j |m_j^T x| <= 1, where `cols` holds the m_j as
// columns with full row rank. Solved as 1 / min ||M^T x||_1 over a^T x = 1:
// IRLS proposes a vertex and subgradient multipliers certify it exactly.
// Uncertified cases fall back to l1_support_simplex (iterations then carry
// +1e6). Throws NumericError on failure.
L1SupportResult l1_support_value(const Eigen::MatrixXd& cols, const Eigen::VectorXd& a);

// Reference solver: bounded-variable primal simplex on the dual form
// max lambda  s.t.  sum_j z_j m_j = lambda a,  |z_j| <= 1,  optimum 1/value.
L1SupportResult l1_support_simplex(const Eigen::MatrixXd& cols, const Eigen::VectorXd& a);

}  // namespace slidenorm
