#pragma once

#include <Eigen/Dense>

namespace supportfit {

struct NnlsResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;  ///< b - A x
  int iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active-set solver for min |A x - b| subject to x >= 0.
/// Passive-set subproblems use a complete orthogonal decomposition, so
/// rank-deficient column sets are handled with minimum-norm solutions.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iters = 0);

}  // namespace supportfit
