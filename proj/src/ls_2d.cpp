// Planar least squares over support vectors.
//
// With directions sorted by angle t_1 < ... < t_n and every gap below pi, a
// vector h is the support vector of a convex polygon iff G h >= 0 where row i
// of G carries the three-term circular convexity inequality. The weighted
// projection min sum_k w_k (Ybar_k - h_k)^2 s.t. G h >= 0 is solved through
// its dual, which is a nonnegative least-squares problem:
//   z = W^{1/2} h,  B = G W^{-1/2},  mu* = argmin_{mu >= 0} |B^T mu + W^{1/2} Ybar|,
//   z* = W^{1/2} Ybar + B^T mu*.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "supportfit/errors.hpp"
#include "supportfit/estimators.hpp"
#include "supportfit/nnls.hpp"

namespace supportfit {

namespace {

constexpr double kAngleMergeTol = 1e-12;

struct Bin {
  double angle = 0.0;
  double sum = 0.0;
  double weight = 0.0;
};

}  // namespace

FitResult fit_ls_2d(const MeasurementSet& data, const QPSettings& settings) {
  data.validate();
  if (data.dim() != 2) throw MalformedInput("fit_ls_2d needs planar directions");

  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::pair<double, double>> samples;
  samples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& u = data.directions[i];
    double t = std::atan2(u[1], u[0]);
    if (t < 0.0) t += two_pi;
    samples.emplace_back(t, data.values[i]);
  }
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Bin> bins;
  for (const auto& [t, y] : samples) {
    if (!bins.empty() && t - bins.back().angle <= kAngleMergeTol) {
      bins.back().sum += y;
      bins.back().weight += 1.0;
    } else {
      bins.push_back({t, y, 1.0});
    }
  }
  if (bins.size() > 1 && bins.front().angle + two_pi - bins.back().angle <= kAngleMergeTol) {
    bins.front().sum += bins.back().sum;
    bins.front().weight += bins.back().weight;
    bins.pop_back();
  }

  const auto n = static_cast<Eigen::Index>(bins.size());
  auto gap_after = [&](Eigen::Index i) {
    const Eigen::Index next = (i + 1) % n;
    double g = bins[static_cast<std::size_t>(next)].angle - bins[static_cast<std::size_t>(i)].angle;
    if (g <= 0.0) g += two_pi;
    return g;
  };

  bool half_plane = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (gap_after(i) >= std::numbers::pi - 1e-12) half_plane = true;
  }
  if (n < 3 || half_plane) {
    FitResult fallback = fit_ls_full(data, settings);
    fallback.diagnostics.estimator = "qp2d";
    fallback.diagnostics.warnings.push_back(
        n < 3 ? "fewer than 3 distinct angles; solved with the full LS formulation"
              : "directions lie in a half-plane; solved with the full LS formulation");
    return fallback;
  }

  Eigen::VectorXd ybar(n), w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Bin& b = bins[static_cast<std::size_t>(k)];
    ybar(k) = b.sum / b.weight;
    w(k) = b.weight;
  }
  const Eigen::VectorXd sqrt_w = w.cwiseSqrt();

  // Row i: sin(g_i) h_{i-1} - sin(g_{i-1} + g_i) h_i + sin(g_{i-1}) h_{i+1} >= 0,
  // where g_i = t_{i+1} - t_i.
  Eigen::MatrixXd b_mat = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index prev = (i + n - 1) % n;
    const Eigen::Index next = (i + 1) % n;
    const double g_prev = gap_after(prev);
    const double g_next = gap_after(i);
    b_mat(i, prev) += std::sin(g_next) / sqrt_w(prev);
    b_mat(i, i) -= std::sin(g_prev + g_next) / sqrt_w(i);
    b_mat(i, next) += std::sin(g_prev) / sqrt_w(next);
  }
  const Eigen::VectorXd target = sqrt_w.cwiseProduct(ybar);
  const NnlsResult dual = nnls(b_mat.transpose(), -target);
  // residual = -target - B^T mu  =>  z = -residual
  const Eigen::VectorXd h = (-dual.residual).cwiseQuotient(sqrt_w);

  // Vertex i: intersection of the supporting lines at t_i and t_{i+1}.
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index next = (i + 1) % n;
    const double ti = bins[static_cast<std::size_t>(i)].angle;
    const double tn = bins[static_cast<std::size_t>(next)].angle;
    Eigen::Matrix2d m;
    m << std::cos(ti), std::sin(ti), std::cos(tn), std::sin(tn);
    Eigen::Vector2d rhs(h(i), h(next));
    vertices.emplace_back(m.partialPivLu().solve(rhs));
  }

  FitResult out{Polytope(vertices), {}, 0.0, {}};
  out.fitted = sample_support(Body(out.polytope), data.directions);
  out.objective = ls_objective(data, out.polytope);
  out.diagnostics.estimator = "qp2d";
  out.diagnostics.iterations = dual.iterations;
  out.diagnostics.certified = dual.converged;

  // Certificate: constraint violation of h and the mismatch between h and the
  // support of the reconstructed polygon at the design angles.
  const Eigen::VectorXd gh = b_mat * sqrt_w.cwiseProduct(h);
  double mismatch = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Point u(2);
    const double t = bins[static_cast<std::size_t>(k)].angle;
    u << std::cos(t), std::sin(t);
    mismatch = std::max(mismatch,
                        std::abs(support_polytope(out.polytope, Direction::normalized(u)) - h(k)));
  }
  out.diagnostics.kkt_residual = std::max(std::max(0.0, -gh.minCoeff()), mismatch);
  if (out.diagnostics.kkt_residual > settings.kkt_tol) {
    out.diagnostics.certified = false;
    out.diagnostics.warnings.push_back("support-vector reconstruction mismatch " +
                                       std::to_string(out.diagnostics.kkt_residual));
  }
  return out;
}

}  // namespace supportfit
