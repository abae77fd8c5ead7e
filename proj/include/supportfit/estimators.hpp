#pragma once

// Least-squares estimators of a convex body from noisy support values:
//   * full LS over all convex bodies (point-variable QP, any dimension),
//   * the planar support-vector QP with circular convexity constraints,
//   * the vertex-budget sieve over polytopes with at most m vertices,
//   * the argmin over a caller-supplied finite family.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "supportfit/geometry.hpp"

namespace supportfit {

/// Paired directions and noisy support values Y_i = h_K(u_i) + noise.
struct MeasurementSet {
  std::vector<Direction> directions;
  std::vector<double> values;
  double sigma = 0.0;
  double gamma = 1.0;

  std::size_t size() const { return values.size(); }
  int dim() const { return directions.empty() ? 0 : directions.front().dim(); }
  /// Throws MalformedInput for ragged/empty lists and ParameterError for
  /// sigma < 0 or gamma <= 0.
  void validate() const;
};

struct QPSettings {
  double kkt_tol = 1e-8;
  int max_iters = 200000;
  double rho = 0.1;             ///< initial ADMM penalty
  double prox = 1e-6;           ///< proximal regularization of the x-update
  double relaxation = 1.6;
  int check_every = 25;
  bool adaptive_rho = true;
  bool polish = true;
  std::size_t max_variables = 3000;  ///< cap on n * d
};

struct SieveConfig {
  std::size_t m = 1;
  int restarts = 20;
  int max_rounds = 200;
  double ridge = 1e-10;
  /// Radial projection onto B(0, gamma) after each vertex update; false
  /// optimizes over unbounded polytopes with at most m vertices.
  bool project_to_ball = true;
  int workers = 1;
  /// Optional initial vertex set used as restart 0. Missing vertices (fewer
  /// than m) are filled by duplicating the last one, which leaves the
  /// starting objective unchanged.
  std::optional<std::vector<Point>> warm_start;
};

struct FitDiagnostics {
  std::string estimator;
  int iterations = 0;          ///< QP iterations or sieve rounds of the winner
  double kkt_residual = 0.0;   ///< QP estimators only
  bool certified = true;
  int best_restart = -1;       ///< sieve only
  std::vector<double> objective_trace;   ///< sieve: accepted objective per round
  std::vector<std::vector<double>> restart_traces;
  std::vector<std::string> warnings;
};

struct FitResult {
  Polytope polytope;
  SupportSamples fitted;   ///< support of `polytope` at the data directions
  double objective = 0.0;  ///< sum_i (Y_i - fitted_i)^2
  FitDiagnostics diagnostics;
};

/// Sum of squared residuals of the polytope's support against the data.
double ls_objective(const MeasurementSet& data, const Polytope& p);

/// Full least squares over all convex bodies. Solves
///   min sum_i (Y_i - u_i.x_i)^2  s.t.  u_j.x_i <= u_j.x_j  for all i != j
/// over point variables x_i in R^d by ADMM with KKT certification and an
/// active-set polish step. Returns conv{x_i}.
/// Throws SizeError when n * d exceeds settings.max_variables.
FitResult fit_ls_full(const MeasurementSet& data, const QPSettings& settings = {});

/// Planar LS over support vectors with the circular convexity constraints
///   h_{i-1} sin(t_{i+1} - t_i) + h_{i+1} sin(t_i - t_{i-1}) >= h_i sin(t_{i+1} - t_{i-1}).
/// Requires d = 2. Repeated angles are merged (averaged Y, weighted). Falls
/// back to fit_ls_full with fewer than 3 distinct angles or when all
/// directions lie in a closed half-plane (some angular gap >= pi).
FitResult fit_ls_2d(const MeasurementSet& data, const QPSettings& settings = {});

/// Sieved LS over polytopes with at most m vertices inside B(0, gamma), by
/// alternating minimization with random restarts (local minimizer only).
FitResult fit_sieve_polytope(const MeasurementSet& data, const SieveConfig& config,
                             std::uint64_t seed);

/// Exhaustive argmin over `family` (first minimizer in list order).
/// Throws ParameterError for an empty family.
FitResult fit_ls_net(const MeasurementSet& data, std::span<const Polytope> family);

enum class DesignSetting { Fixed, Random };

/// Vertex budget. Fixed design: sigma^{-2(d-1)/(d+3)} gamma^{2(d-1)/(d+3)} n^{(d-1)/(d+3)};
/// random design: n^{(d-1)/(d+3)}. Rounded and clamped to [1, n].
std::size_t choose_m(std::size_t n, int d, double sigma, double gamma, DesignSetting setting);

}  // namespace supportfit
