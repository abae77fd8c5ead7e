// Nearest point in a polytope via Wolfe's minimum-norm-point algorithm.
//
// The vertices are translated so that the query point sits at the origin; the
// problem becomes finding the point of smallest norm in conv{p_k}. The method
// keeps a corral S of affinely independent vertices and convex weights w on S.
// A major step adds the vertex minimizing y.p_k; minor steps move toward the
// affine minimizer of S and drop vertices whose weight hits zero.

#include <algorithm>
#include <cmath>
#include <limits>

#include "supportfit/errors.hpp"
#include "supportfit/geometry.hpp"

namespace supportfit {

namespace {

// Minimum-norm point of the affine hull of the columns of `pts`, expressed as
// affine weights (sum to one).
Eigen::VectorXd affine_minimizer(const Eigen::MatrixXd& pts) {
  const Eigen::Index k = pts.cols();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
  kkt.topLeftCorner(k, k) = pts.transpose() * pts;
  kkt.topRightCorner(k, 1).setOnes();
  kkt.bottomLeftCorner(1, k).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd lambda = sol.head(k);
  const double total = lambda.sum();
  if (std::abs(total) > 0.0) lambda /= total;
  return lambda;
}

}  // namespace

Projection project_point_to_polytope(const Point& x, const Polytope& q, double gap_tol,
                                     int max_iters) {
  if (x.size() != q.dim()) throw MalformedInput("project_point_to_polytope: dimension mismatch");
  const Eigen::MatrixXd pts = q.vertices().colwise() - x;
  const Eigen::Index n = pts.cols();

  Eigen::Index start = 0;
  pts.colwise().squaredNorm().minCoeff(&start);
  std::vector<Eigen::Index> corral{start};
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd y = pts.col(start);

  auto corral_matrix = [&] {
    Eigen::MatrixXd m(pts.rows(), static_cast<Eigen::Index>(corral.size()));
    for (std::size_t i = 0; i < corral.size(); ++i) {
      m.col(static_cast<Eigen::Index>(i)) = pts.col(corral[i]);
    }
    return m;
  };

  Projection out;
  double gap = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    Eigen::Index entering = 0;
    const double best = (pts.transpose() * y).minCoeff(&entering);
    gap = y.squaredNorm() - best;
    if (gap <= gap_tol) break;
    if (std::find(corral.begin(), corral.end(), entering) != corral.end()) break;
    corral.push_back(entering);
    weights.conservativeResize(weights.size() + 1);
    weights(weights.size() - 1) = 0.0;

    // Minor cycle.
    for (int minor = 0; minor <= static_cast<int>(n) + 1; ++minor) {
      const Eigen::MatrixXd m = corral_matrix();
      const Eigen::VectorXd lambda = affine_minimizer(m);
      if ((lambda.array() > 0.0).all()) {
        weights = lambda;
        break;
      }
      double step = 1.0;
      for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) <= 0.0) {
          const double denom = weights(i) - lambda(i);
          if (denom > 0.0) step = std::min(step, weights(i) / denom);
        }
      }
      weights = weights + step * (lambda - weights);
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_w;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (weights(static_cast<Eigen::Index>(i)) > 1e-15) {
          kept.push_back(corral[i]);
          kept_w.push_back(weights(static_cast<Eigen::Index>(i)));
        }
      }
      if (kept.empty()) {
        // Degenerate step; keep the entering vertex alone.
        kept.push_back(corral.back());
        kept_w.push_back(1.0);
      }
      corral = std::move(kept);
      weights = Eigen::Map<Eigen::VectorXd>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
      weights /= weights.sum();
    }
    y = corral_matrix() * weights;
  }
  // Final certificate on the returned point.
  gap = y.squaredNorm() - (pts.transpose() * y).minCoeff();
  out.point = x + y;
  out.distance = y.norm();
  out.gap = std::max(0.0, gap);
  out.iterations = iter;
  return out;
}

}  // namespace supportfit
