#pragma once

// Synthetic experiments: data generation, Monte Carlo risk at a fixed truth,
// and log-log rate fits against the n^{-4/(d+3)} exponent.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "supportfit/estimators.hpp"
#include "supportfit/geometry.hpp"
#include "supportfit/rng.hpp"
#include "supportfit/stats.hpp"

namespace supportfit {

enum class DesignKind { Uniform, Even2d, Packing };

struct DesignSpec {
  DesignKind kind = DesignKind::Uniform;
  double epsilon = 0.1;  ///< packing radius, Packing only; n is then the packing size
};

enum class EstimatorKind { Full, Qp2d, Sieve, Net };
enum class LossKind { F, R, Hausdorff };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Sieve;
  QPSettings qp;
  int restarts = 20;
  int max_rounds = 200;
  double ridge = 1e-10;
  bool project_to_ball = true;
  std::optional<std::size_t> m;   ///< sieve budget; choose_m(n) when empty
  std::vector<double> net_radii;  ///< net family: scaled ball surrogates
};

/// Regular k-gon with circumradius `radius`, first vertex at angle `phase`.
Polytope regular_polygon(std::size_t k, double radius, double phase = 0.0);
/// Inscribed polytope standing in for the ball of the given radius: a 64-gon
/// in the plane, a fixed-seed packing of directions in higher dimension.
Polytope ball_surrogate(int d, double radius);
/// Benchmark truths scaled to circumradius 0.7 gamma: "square", "pentagon",
/// "segment" (d = 2), "simplex" (d = 3) and "ball" (any d).
Polytope benchmark_truth(const std::string& name, int d, double gamma);
/// Names of the benchmark truths available in dimension d.
std::vector<std::string> benchmark_suite(int d);

struct ExperimentSpec {
  int dim = 2;
  Body truth = benchmark_truth("square", 2, 1.0);
  DesignSpec design{DesignKind::Even2d, 0.1};
  DesignSetting setting = DesignSetting::Fixed;
  double sigma = 0.1;
  double gamma = 1.0;
  std::vector<std::size_t> n_grid{64, 128, 256, 512, 1024, 2048, 4096};
  int reps = 100;
  EstimatorSpec estimator;
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::size_t loss_mc = 10000;     ///< fresh directions for the random-design loss
  std::optional<LossKind> loss;    ///< default: F for fixed, R for random designs

  LossKind loss_kind() const;
  /// Throws ParameterError/MalformedInput/ValidationError on inconsistent specs.
  void validate() const;
};

std::vector<Direction> draw_design(const DesignSpec& design, int d, std::size_t n, Rng& rng);

/// Y_i = h_K(u_i) + sigma * xi_i with iid standard normal xi. Throws
/// ValidationError when the truth is not contained in B(0, gamma).
MeasurementSet generate_data(const Body& truth, std::vector<Direction> directions,
                             double sigma, double gamma, std::uint64_t seed);
MeasurementSet generate_data(const Body& truth, const DesignSpec& design, int d,
                             std::size_t n, double sigma, double gamma, std::uint64_t seed);

/// Runs the configured estimator on one data set.
FitResult run_estimator(const EstimatorSpec& est, const MeasurementSet& data,
                        DesignSetting setting, std::uint64_t seed);

struct RiskEstimate {
  std::size_t n = 0;
  LossKind loss_kind = LossKind::F;
  double mean = 0.0;
  double std_error = 0.0;
  int reps = 0;
  int uncertified = 0;  ///< trials whose solver did not certify
};

RiskEstimate estimate_risk(const ExperimentSpec& spec, std::size_t n);

/// Risk of every benchmark truth of the spec's dimension (spec.truth is
/// ignored) and the worst of them, the surrogate for the supremum over bodies.
struct SuiteRisk {
  std::vector<std::pair<std::string, RiskEstimate>> per_truth;
  RiskEstimate worst;
  std::string worst_truth;
};

SuiteRisk estimate_suite_risk(const ExperimentSpec& spec, std::size_t n);

struct RateReport {
  std::vector<RiskEstimate> cells;
  RateFit fit;
};

/// Target log-log slope -4 / (d + 3).
double rate_exponent(int d);

/// Risk at every n of the grid (all trials of all cells share one worker
/// pool) and the log-log fit against rate_exponent(dim).
RateReport run_rate(const ExperimentSpec& spec, double tolerance);

/// Fit of log mean against log n. Points with nonpositive means are dropped
/// with a warning.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points, double target,
                 double tolerance);

std::string loss_kind_name(LossKind k);
std::string format_double(double v);

/// CSV with header n,loss_kind,mean,stderr,reps and LF line endings.
void write_risk_csv(std::ostream& os, const std::vector<RiskEstimate>& cells);
/// "slope=..., target=..., pass=true|false"
std::string rate_summary(const RateFit& fit);

}  // namespace supportfit
