// Full least-squares support estimator in point variables.
//
// Variables X = [x_1 ... x_n] (d x n). Constraint (i, j), i != j, reads
// u_j.x_i - u_j.x_j <= 0; constraint values and multipliers are stored as
// n x n matrices with an unused diagonal. The constraint operator A is never
// formed: with S = U^T X,
//   (A X)(i, j)        = S(j, i) - S(j, j)
//   (A^T L).col(i)     = sum_j L(i, j) u_j - (sum_k L(k, i)) u_i.
// The x-update matrix P + prox I + rho A^T A is dense (n d x n d) and small at
// the sizes this estimator targets, so it is factorized directly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "supportfit/errors.hpp"
#include "supportfit/estimators.hpp"
#include "supportfit/nnls.hpp"

namespace supportfit {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Problem {
  Index n = 0;
  Index d = 0;
  MatrixXd u;  // d x n directions
  VectorXd y;  // data

  MatrixXd constraint_values(const MatrixXd& x) const {
    const MatrixXd s = u.transpose() * x;  // s(j, i) = u_j . x_i
    MatrixXd c = s.transpose();
    for (Index j = 0; j < n; ++j) c.col(j).array() -= s(j, j);
    c.diagonal().setZero();
    return c;
  }

  MatrixXd adjoint(const MatrixXd& lam) const {
    MatrixXd g = u * lam.transpose();
    const VectorXd colsum = lam.colwise().sum().transpose();
    for (Index i = 0; i < n; ++i) g.col(i) -= colsum(i) * u.col(i);
    return g;
  }

  // P X + q, column-wise: 2 u_i (u_i.x_i - Y_i).
  MatrixXd objective_gradient(const MatrixXd& x) const {
    MatrixXd g(d, n);
    for (Index i = 0; i < n; ++i) g.col(i) = 2.0 * (u.col(i).dot(x.col(i)) - y(i)) * u.col(i);
    return g;
  }

  MatrixXd hessian_product(const MatrixXd& x) const {
    MatrixXd g(d, n);
    for (Index i = 0; i < n; ++i) g.col(i) = 2.0 * u.col(i).dot(x.col(i)) * u.col(i);
    return g;
  }

  MatrixXd linear_term() const {
    MatrixXd q(d, n);
    for (Index i = 0; i < n; ++i) q.col(i) = -2.0 * y(i) * u.col(i);
    return q;
  }

  // P + prox I + rho A^T A, (n d) x (n d), block (i, k) at rows i d, cols k d.
  MatrixXd system_matrix(double prox, double rho) const {
    const Index nd = n * d;
    MatrixXd k(nd, nd);
    const MatrixXd total = u * u.transpose();
    for (Index i = 0; i < n; ++i) {
      const MatrixXd ui = u.col(i) * u.col(i).transpose();
      for (Index j = 0; j < n; ++j) {
        if (i == j) {
          k.block(i * d, i * d, d, d) =
              (2.0 + rho * static_cast<double>(n - 2)) * ui + rho * total +
              prox * MatrixXd::Identity(d, d);
        } else {
          k.block(i * d, j * d, d, d) = -rho * (ui + u.col(j) * u.col(j).transpose());
        }
      }
    }
    return k;
  }
};

double inf_norm(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct Kkt {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
  double dual_sign = 0.0;
  double worst() const {
    return std::max({stationarity, feasibility, complementarity, dual_sign});
  }
};

Kkt kkt_error(const Problem& pb, const MatrixXd& x, const MatrixXd& lam) {
  Kkt e;
  const MatrixXd c = pb.constraint_values(x);
  e.stationarity = inf_norm(pb.objective_gradient(x) + pb.adjoint(lam));
  e.feasibility = std::max(0.0, c.maxCoeff());
  e.complementarity = inf_norm(lam.cwiseProduct(c));
  e.dual_sign = std::max(0.0, -lam.minCoeff());
  return e;
}

struct Iterate {
  MatrixXd x;
  MatrixXd lam;
  double kkt = std::numeric_limits<double>::infinity();
};

// Equality-constrained LS on the guessed active set, solved as a few
// proximal-point steps anchored at the ADMM iterate so that directions in
// which the objective is flat keep their (feasible) ADMM values. Nonnegative
// multipliers then come from NNLS on the active rows.
std::optional<Iterate> polish(const Problem& pb, const MatrixXd& x0, const MatrixXd& z,
                              const MatrixXd& lam) {
  constexpr double kProx = 1e-7;
  constexpr int kSteps = 4;
  std::vector<std::pair<Index, Index>> active;
  for (Index i = 0; i < pb.n; ++i) {
    for (Index j = 0; j < pb.n; ++j) {
      if (i != j && lam(i, j) > -z(i, j)) active.emplace_back(i, j);
    }
  }
  const Index nd = pb.n * pb.d;
  const auto na = static_cast<Index>(active.size());
  MatrixXd a = MatrixXd::Zero(na, nd);
  for (Index r = 0; r < na; ++r) {
    const auto [i, j] = active[static_cast<std::size_t>(r)];
    a.block(r, i * pb.d, 1, pb.d) += pb.u.col(j).transpose();
    a.block(r, j * pb.d, 1, pb.d) -= pb.u.col(j).transpose();
  }
  MatrixXd kkt = MatrixXd::Zero(nd + na, nd + na);
  for (Index i = 0; i < pb.n; ++i) {
    kkt.block(i * pb.d, i * pb.d, pb.d, pb.d) = 2.0 * pb.u.col(i) * pb.u.col(i).transpose();
  }
  kkt.topLeftCorner(nd, nd).diagonal().array() += kProx;
  kkt.topRightCorner(nd, na) = a.transpose();
  kkt.bottomLeftCorner(na, nd) = a;
  const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);

  const MatrixXd q = pb.linear_term();
  VectorXd x = Eigen::Map<const VectorXd>(x0.data(), nd);
  for (int step = 0; step < kSteps; ++step) {
    VectorXd rhs = VectorXd::Zero(nd + na);
    rhs.head(nd) = -Eigen::Map<const VectorXd>(q.data(), nd) + kProx * x;
    const VectorXd sol = cod.solve(rhs);
    if (!sol.allFinite()) return std::nullopt;
    x = sol.head(nd);
  }

  Iterate it;
  it.x = Eigen::Map<const MatrixXd>(x.data(), pb.d, pb.n);
  it.lam = MatrixXd::Zero(pb.n, pb.n);
  if (na > 0) {
    const MatrixXd g = pb.objective_gradient(it.x);
    const VectorXd gv = Eigen::Map<const VectorXd>(g.data(), nd);
    const NnlsResult mult = nnls(a.transpose(), -gv);
    for (Index r = 0; r < na; ++r) {
      const auto [i, j] = active[static_cast<std::size_t>(r)];
      it.lam(i, j) = mult.x(r);
    }
  }
  it.kkt = kkt_error(pb, it.x, it.lam).worst();
  return it;
}

}  // namespace

FitResult fit_ls_full(const MeasurementSet& data, const QPSettings& settings) {
  data.validate();
  if (!(settings.kkt_tol > 0.0)) throw ParameterError("kkt_tol must be positive");
  Problem pb;
  pb.n = static_cast<Index>(data.size());
  pb.d = data.dim();
  if (static_cast<std::size_t>(pb.n * pb.d) > settings.max_variables) {
    throw SizeError("full LS problem has " + std::to_string(pb.n * pb.d) +
                    " variables; cap is " + std::to_string(settings.max_variables));
  }
  pb.u.resize(pb.d, pb.n);
  pb.y.resize(pb.n);
  for (Index i = 0; i < pb.n; ++i) {
    pb.u.col(i) = data.directions[static_cast<std::size_t>(i)].coords();
    pb.y(i) = data.values[static_cast<std::size_t>(i)];
  }

  FitDiagnostics diag;
  diag.estimator = "full";
  MatrixXd best_x(pb.d, pb.n);
  for (Index i = 0; i < pb.n; ++i) best_x.col(i) = pb.y(i) * pb.u.col(i);

  if (pb.n > 1) {
    const Index nd = pb.n * pb.d;
    const MatrixXd q = pb.linear_term();
    double rho = settings.rho;
    Eigen::LLT<MatrixXd> factor(pb.system_matrix(settings.prox, rho));

    MatrixXd x = best_x;
    MatrixXd z = pb.constraint_values(x).cwiseMin(0.0);
    MatrixXd lam = MatrixXd::Zero(pb.n, pb.n);
    const double alpha = settings.relaxation;
    Iterate best;
    best.x = x;
    best.lam = lam;
    int polish_attempts = 0;
    int iter = 0;
    for (; iter < settings.max_iters; ++iter) {
      const MatrixXd rhs = settings.prox * x - q + pb.adjoint(rho * z - lam);
      VectorXd xt_flat = factor.solve(Eigen::Map<const VectorXd>(rhs.data(), nd));
      const MatrixXd xt = Eigen::Map<const MatrixXd>(xt_flat.data(), pb.d, pb.n);
      const MatrixXd zt = pb.constraint_values(xt);
      x = alpha * xt + (1.0 - alpha) * x;
      const MatrixXd zhat = alpha * zt + (1.0 - alpha) * z;
      z = (zhat + lam / rho).cwiseMin(0.0);
      z.diagonal().setZero();
      lam += rho * (zhat - z);
      lam.diagonal().setZero();

      if ((iter + 1) % settings.check_every != 0) continue;
      const MatrixXd ax = pb.constraint_values(x);
      const MatrixXd aty = pb.adjoint(lam);
      const double prim = inf_norm(ax - z);
      const double dual = inf_norm(pb.objective_gradient(x) + aty);
      const double err = kkt_error(pb, x, lam).worst();
      if (err < best.kkt) {
        best.x = x;
        best.lam = lam;
        best.kkt = err;
      }
      if (best.kkt <= settings.kkt_tol) break;

      if (settings.polish && std::max(prim, dual) < 1e-3 &&
          (iter + 1) % (settings.check_every * (4 << std::min(polish_attempts, 8))) == 0) {
        ++polish_attempts;
        if (auto pol = polish(pb, x, z, lam); pol && pol->kkt < best.kkt) {
          best = *pol;
          if (best.kkt <= settings.kkt_tol) break;
        }
      }

      if (settings.adaptive_rho) {
        const double prim_scale = std::max({inf_norm(ax), inf_norm(z), 1e-12});
        const double dual_scale = std::max(
            {inf_norm(pb.hessian_product(x)), inf_norm(aty), inf_norm(q), 1e-12});
        const double ratio = (prim / prim_scale) / std::max(dual / dual_scale, 1e-300);
        const double proposal = std::clamp(rho * std::sqrt(ratio), 1e-6, 1e6);
        if (proposal > 5.0 * rho || proposal < 0.2 * rho) {
          rho = proposal;
          factor.compute(pb.system_matrix(settings.prox, rho));
        }
      }
    }
    diag.iterations = std::min(iter + 1, settings.max_iters);
    best_x = best.x;
    diag.kkt_residual = best.kkt;
    diag.certified = best.kkt <= settings.kkt_tol;
    if (!diag.certified) {
      diag.warnings.push_back("full LS not certified: KKT residual " +
                              std::to_string(best.kkt));
    }
  }

  FitResult out{Polytope(best_x), {}, 0.0, std::move(diag)};
  out.fitted = sample_support(Body(out.polytope), data.directions);
  out.objective = ls_objective(data, out.polytope);
  return out;
}

}  // namespace supportfit
