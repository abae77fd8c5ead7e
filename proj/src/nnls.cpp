#include "supportfit/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "supportfit/errors.hpp"

namespace supportfit {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const std::vector<bool>& passive) {
  std::vector<Eigen::Index> idx;
  for (std::size_t j = 0; j < passive.size(); ++j) {
    if (passive[j]) idx.push_back(static_cast<Eigen::Index>(j));
  }
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
  const Eigen::VectorXd z = sub.completeOrthogonalDecomposition().solve(b);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(a.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) full(idx[k]) = z(static_cast<Eigen::Index>(k));
  return full;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iters) {
  if (a.rows() != b.size()) throw MalformedInput("nnls: A and b row counts differ");
  const Eigen::Index n = a.cols();
  if (max_iters <= 0) max_iters = static_cast<int>(3 * n + 30);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(1.0, a.cwiseAbs().colwise().sum().maxCoeff()) *
                     static_cast<double>(std::max(a.rows(), n)) *
                     std::max(1.0, b.cwiseAbs().maxCoeff());

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd w = a.transpose() * (b - a * out.x);

  int iter = 0;
  while (iter < max_iters) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) {
      out.converged = true;
      break;
    }
    passive[static_cast<std::size_t>(t)] = true;

    for (;;) {
      ++iter;
      Eigen::VectorXd s = solve_passive(a, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        out.x = s;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      Eigen::Index blocking = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          const double denom = out.x(j) - s(j);
          const double ratio = denom > 0.0 ? out.x(j) / denom : 0.0;
          if (ratio < alpha) {
            alpha = ratio;
            blocking = j;
          }
        }
      }
      out.x += alpha * (s - out.x);
      out.x(blocking) = 0.0;
      bool removed = false;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && out.x(j) <= 0.0) {
          passive[static_cast<std::size_t>(j)] = false;
          out.x(j) = 0.0;
          removed = true;
        }
      }
      if (!removed || iter >= max_iters) break;
    }
    w = a.transpose() * (b - a * out.x);
  }
  out.x = out.x.cwiseMax(0.0);
  out.residual = b - a * out.x;
  out.iterations = iter;
  return out;
}

}  // namespace supportfit
