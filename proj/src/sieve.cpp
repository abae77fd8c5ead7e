// Vertex-budget sieve: least squares over polytopes with at most m vertices.
//
// Alternating minimization. A round assigns every direction to its argmax
// vertex (lowest index on ties), refits each vertex by a ridge-stabilized
// linear least-squares problem on its cluster, projects it radially onto
// B(0, gamma) and reseeds empty clusters at Y_i u_i for the worst-fitted
// directions. Because the true objective uses max_j x_j.u_i rather than the
// assigned vertex, the candidate is only accepted when it does not increase
// the objective; otherwise the step is halved toward the current vertices and
// the run stops when no halving helps. The accepted objective sequence is
// therefore non-increasing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "supportfit/errors.hpp"
#include "supportfit/estimators.hpp"
#include "supportfit/parallel.hpp"
#include "supportfit/rng.hpp"

namespace supportfit {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kMaxHalvings = 12;

struct Data {
  MatrixXd u;  // d x n
  VectorXd y;
  double gamma = 1.0;
};

struct Evaluation {
  double objective = 0.0;
  std::vector<Index> owner;  // argmax vertex per direction
  VectorXd fitted;
};

Evaluation evaluate(const Data& data, const MatrixXd& x) {
  const MatrixXd scores = x.transpose() * data.u;  // m x n
  Evaluation ev;
  ev.owner.resize(static_cast<std::size_t>(data.u.cols()));
  ev.fitted.resize(data.u.cols());
  double total = 0.0;
  for (Index i = 0; i < scores.cols(); ++i) {
    Index best = 0;
    double value = scores(0, i);
    for (Index j = 1; j < scores.rows(); ++j) {
      if (scores(j, i) > value) {
        value = scores(j, i);
        best = j;
      }
    }
    ev.owner[static_cast<std::size_t>(i)] = best;
    ev.fitted(i) = value;
    const double r = data.y(i) - value;
    total += r * r;
  }
  ev.objective = total;
  return ev;
}

void project(Eigen::Ref<VectorXd> x, const Data& data, bool to_ball) {
  if (!to_ball) return;
  const double norm = x.norm();
  if (norm > data.gamma) x *= data.gamma / norm;
}

struct RunResult {
  MatrixXd vertices;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  int rounds = 0;
};

RunResult run(const Data& data, MatrixXd x, const SieveConfig& cfg) {
  const Index d = data.u.rows();
  const Index m = x.cols();
  RunResult out;
  Evaluation current = evaluate(data, x);
  out.trace.push_back(current.objective);

  int round = 0;
  for (; round < cfg.max_rounds; ++round) {
    MatrixXd candidate = x;
    std::vector<MatrixXd> gram(static_cast<std::size_t>(m), MatrixXd::Zero(d, d));
    std::vector<VectorXd> rhs(static_cast<std::size_t>(m), VectorXd::Zero(d));
    std::vector<Index> members(static_cast<std::size_t>(m), 0);
    for (Index i = 0; i < data.u.cols(); ++i) {
      const auto j = static_cast<std::size_t>(current.owner[static_cast<std::size_t>(i)]);
      gram[j].noalias() += data.u.col(i) * data.u.col(i).transpose();
      rhs[j] += data.y(i) * data.u.col(i);
      ++members[j];
    }
    std::vector<Index> empty;
    for (Index j = 0; j < m; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (members[sj] == 0) {
        empty.push_back(j);
        continue;
      }
      // min sum (Y_i - x.u_i)^2 + ridge |x - x_j|^2
      const MatrixXd lhs = gram[sj] + cfg.ridge * MatrixXd::Identity(d, d);
      const VectorXd b = rhs[sj] + cfg.ridge * x.col(j);
      candidate.col(j) = lhs.ldlt().solve(b);
      project(candidate.col(j), data, cfg.project_to_ball);
    }
    if (!empty.empty()) {
      std::vector<Index> order(static_cast<std::size_t>(data.u.cols()));
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(data.y(a) - current.fitted(a)) > std::abs(data.y(b) - current.fitted(b));
      });
      for (std::size_t k = 0; k < empty.size() && k < order.size(); ++k) {
        const Index i = order[k];
        candidate.col(empty[k]) = data.y(i) * data.u.col(i);
        project(candidate.col(empty[k]), data, cfg.project_to_ball);
      }
    }

    Evaluation next = evaluate(data, candidate);
    int halvings = 0;
    while (next.objective > current.objective && halvings < kMaxHalvings) {
      candidate = 0.5 * (candidate + x);
      next = evaluate(data, candidate);
      ++halvings;
    }
    if (next.objective > current.objective) break;
    const double gain = current.objective - next.objective;
    x = std::move(candidate);
    current = std::move(next);
    out.trace.push_back(current.objective);
    if (gain <= 1e-14 * std::max(1.0, current.objective)) {
      ++round;
      break;
    }
  }
  out.vertices = std::move(x);
  out.objective = current.objective;
  out.rounds = round;
  return out;
}

MatrixXd random_start(const Data& data, Index m, Rng& rng, bool to_ball) {
  const Index n = data.u.cols();
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates: the first m entries are a uniform m-subset.
  for (Index k = 0; k < m; ++k) {
    std::uniform_int_distribution<Index> pick(k, n - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  MatrixXd x(data.u.rows(), m);
  for (Index k = 0; k < m; ++k) {
    const Index i = idx[static_cast<std::size_t>(k)];
    x.col(k) = data.y(i) * data.u.col(i);
    project(x.col(k), data, to_ball);
  }
  return x;
}

}  // namespace

FitResult fit_sieve_polytope(const MeasurementSet& measurements, const SieveConfig& config,
                             std::uint64_t seed) {
  measurements.validate();
  if (config.m < 1) throw ParameterError("sieve budget m must be >= 1");
  if (config.restarts < 1) throw ParameterError("sieve needs at least one restart");
  if (config.max_rounds < 0) throw ParameterError("max_rounds must be nonnegative");
  if (!(config.ridge >= 0.0)) throw ParameterError("ridge must be nonnegative");

  Data data;
  const auto n = static_cast<Index>(measurements.size());
  const Index d = measurements.dim();
  data.u.resize(d, n);
  data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    data.u.col(i) = measurements.directions[static_cast<std::size_t>(i)].coords();
    data.y(i) = measurements.values[static_cast<std::size_t>(i)];
  }
  data.gamma = measurements.gamma;

  FitDiagnostics diag;
  diag.estimator = "sieve";
  Index m = static_cast<Index>(config.m);
  if (m > n) {
    diag.warnings.push_back("vertex budget " + std::to_string(config.m) +
                            " exceeds n; clamped to " + std::to_string(n));
    m = n;
  }

  std::optional<MatrixXd> warm;
  if (config.warm_start) {
    const auto& pts = *config.warm_start;
    if (pts.empty()) throw ParameterError("warm start needs at least one vertex");
    if (static_cast<Index>(pts.size()) > m) {
      throw ParameterError("warm start has more vertices than the budget");
    }
    MatrixXd x(d, m);
    for (Index k = 0; k < m; ++k) {
      const auto& p = pts[std::min(static_cast<std::size_t>(k), pts.size() - 1)];
      if (p.size() != d) throw MalformedInput("warm start vertex has the wrong dimension");
      x.col(k) = p;
      project(x.col(k), data, config.project_to_ball);
    }
    warm = std::move(x);
  }

  const auto restarts = static_cast<std::size_t>(config.restarts);
  std::vector<RunResult> runs(restarts);
  parallel_for(restarts, config.workers, [&](std::size_t r) {
    MatrixXd start;
    if (r == 0 && warm) {
      start = *warm;
    } else {
      Rng rng(derive_seed(seed, r));
      start = random_start(data, m, rng, config.project_to_ball);
    }
    runs[r] = run(data, std::move(start), config);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (runs[r].objective < runs[best].objective) best = r;
  }
  diag.best_restart = static_cast<int>(best);
  diag.iterations = runs[best].rounds;
  diag.objective_trace = runs[best].trace;
  diag.restart_traces.reserve(restarts);
  for (auto& r : runs) diag.restart_traces.push_back(std::move(r.trace));

  FitResult out{Polytope(runs[best].vertices), {}, 0.0, std::move(diag)};
  out.fitted = sample_support(Body(out.polytope), measurements.directions);
  out.objective = ls_objective(measurements, out.polytope);
  return out;
}

}  // namespace supportfit
