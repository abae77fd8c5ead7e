#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "supportfit/errors.hpp"
#include "supportfit/estimators.hpp"
#include "supportfit/harness.hpp"
#include "supportfit/sphere.hpp"

using namespace supportfit;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Polytope square() { return Polytope(std::vector<Point>{pt(1, 1), pt(-1, 1), pt(-1, -1), pt(1, -1)}); }

MeasurementSet measurements(const Body& truth, std::vector<Direction> dirs, double sigma,
                            double gamma, std::uint64_t seed) {
  return generate_data(truth, std::move(dirs), sigma, gamma, seed);
}

std::vector<Direction> random_circle(Rng& rng, std::size_t n) {
  std::vector<Direction> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(uniform_direction(rng, 2));
  return out;
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k] > trace[k - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("full LS recovers noiseless square data") {
  const auto data = measurements(Body(square()), evenly_spaced_circle(40), 0.0, 2.0, 1);
  const FitResult fit = fit_ls_full(data);
  CHECK(fit.objective <= 1e-8);
  CHECK(fit.diagnostics.certified);
  CHECK(fit.diagnostics.kkt_residual <= 1e-8);
}

TEST_CASE("full LS trivial inputs") {
  MeasurementSet one;
  one.directions = {Direction(pt(1, 0))};
  one.values = {2.0};
  one.gamma = 3.0;
  const FitResult fit = fit_ls_full(one);
  CHECK(fit.objective == 0.0);
  CHECK(fit.fitted.values[0] == 2.0);
  REQUIRE(fit.polytope.size() == 1);
  CHECK(fit.polytope.vertex(0)[0] == 2.0);

  Rng rng(4);
  MeasurementSet constant;
  for (int i = 0; i < 30; ++i) {
    constant.directions.push_back(uniform_direction(rng, 3));
    constant.values.push_back(0.7);
  }
  const FitResult c = fit_ls_full(constant);
  CHECK(c.objective <= 1e-12);
  for (double h : c.fitted.values) CHECK(h == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("full LS is optimal against hand-built candidates") {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 2 + trial % 2;
    std::vector<Direction> dirs;
    for (int i = 0; i < 30; ++i) dirs.push_back(uniform_direction(rng, d));
    const Body truth = d == 2 ? Body(benchmark_truth("pentagon", 2, 1.0))
                              : Body(benchmark_truth("simplex", 3, 1.0));
    const auto data = measurements(truth, dirs, 0.2, 1.0, derive_seed(9, trial));
    const FitResult fit = fit_ls_full(data);
    CHECK(fit.diagnostics.certified);
    double mean = 0.0;
    for (double y : data.values) mean += y / data.size();
    double ball_obj = 0.0;
    for (double y : data.values) ball_obj += (y - mean) * (y - mean);
    CHECK(fit.objective <= ball_obj + 1e-9);
    CHECK(fit.objective <= ls_objective(data, std::get<Polytope>(truth)) + 1e-9);
    CHECK(fit.objective == doctest::Approx(ls_objective(data, fit.polytope)).epsilon(1e-12));
  }
}

TEST_CASE("full LS size cap") {
  Rng rng(1);
  const auto data = measurements(Body(square()), random_circle(rng, 100), 0.1, 2.0, 1);
  QPSettings s;
  s.max_variables = 150;
  CHECK_THROWS_AS(fit_ls_full(data, s), SizeError);
  s.kkt_tol = 0.0;
  s.max_variables = 3000;
  CHECK_THROWS_AS(fit_ls_full(data, s), ParameterError);
}

TEST_CASE("planar QP") {
  const auto clean = measurements(Body(square()), evenly_spaced_circle(40), 0.0, 2.0, 1);
  CHECK(fit_ls_2d(clean).objective <= 1e-8);

  // Data that already is a support vector is returned unchanged.
  Rng rng(6);
  const auto dirs = random_circle(rng, 25);
  const auto feasible = measurements(Body(benchmark_truth("pentagon", 2, 1.0)), dirs, 0.0, 1.0, 1);
  const FitResult fit = fit_ls_2d(feasible);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    CHECK(fit.fitted.values[i] == doctest::Approx(feasible.values[i]).epsilon(1e-9));
  }
  CHECK(fit.diagnostics.certified);

  MeasurementSet three_d;
  three_d.directions = {uniform_direction(rng, 3)};
  three_d.values = {1.0};
  CHECK_THROWS_AS(fit_ls_2d(three_d), MalformedInput);
}

TEST_CASE("planar QP merges repeated angles") {
  MeasurementSet data;
  for (double t : {0.0, 0.0, 2.0, 4.0}) data.directions.push_back(Direction(pt(std::cos(t), std::sin(t))));
  data.values = {1.0, 3.0, 1.5, 1.5};
  const FitResult fit = fit_ls_2d(data);
  CHECK(fit.fitted.values[0] == fit.fitted.values[1]);
  const FitResult full = fit_ls_full(data);
  CHECK(fit.objective == doctest::Approx(full.objective).epsilon(1e-6));
}

TEST_CASE("planar QP falls back on half-plane designs") {
  MeasurementSet data;
  for (double t : {0.0, 0.5, 1.0, 1.5}) data.directions.push_back(Direction(pt(std::cos(t), std::sin(t))));
  data.values = {1.0, 0.2, 1.0, 0.3};
  const FitResult fit = fit_ls_2d(data);
  CHECK_FALSE(fit.diagnostics.warnings.empty());
  CHECK(fit.objective == doctest::Approx(fit_ls_full(data).objective).epsilon(1e-6));
}

TEST_CASE("planar QP and full LS agree") {
  Rng rng(123);
  std::uniform_int_distribution<int> size(5, 60);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dirs = random_circle(rng, static_cast<std::size_t>(size(rng)));
    const auto data =
        measurements(Body(benchmark_truth("square", 2, 1.0)), dirs, 0.15, 1.0, derive_seed(5, trial));
    const double a = fit_ls_2d(data).objective;
    const double b = fit_ls_full(data).objective;
    CHECK(std::abs(a - b) <= 1e-6 * std::max(1e-12, std::max(a, b)));
  }
}

TEST_CASE("sieve with one vertex solves the normal equations") {
  Rng rng(3);
  std::vector<Direction> dirs;
  for (int i = 0; i < 50; ++i) dirs.push_back(uniform_direction(rng, 3));
  const auto data = measurements(Body(benchmark_truth("simplex", 3, 1.0)), dirs, 0.1, 1.0, 2);
  Eigen::MatrixXd u(3, 50);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    u.col(i) = dirs[i].coords();
    y(i) = data.values[i];
  }
  const Eigen::VectorXd x = (u * u.transpose()).ldlt().solve(u * y);
  REQUIRE(x.norm() < 1.0);
  SieveConfig cfg;
  cfg.m = 1;
  cfg.restarts = 3;
  const FitResult fit = fit_sieve_polytope(data, cfg, 1);
  REQUIRE(fit.polytope.size() == 1);
  CHECK((fit.polytope.vertex(0) - x).norm() <= 1e-8);

  // Shifted data pushes the solution outside the ball; the result is its
  // radial projection.
  MeasurementSet far = data;
  for (int i = 0; i < 50; ++i) far.values[i] += 3.0 * dirs[i][0];
  const Eigen::VectorXd xf = (u * u.transpose()).ldlt().solve(u * Eigen::Map<Eigen::VectorXd>(far.values.data(), 50));
  REQUIRE(xf.norm() > 1.0);
  const FitResult pf = fit_sieve_polytope(far, cfg, 1);
  CHECK((pf.polytope.vertex(0) - xf / xf.norm()).norm() <= 1e-8);
}

TEST_CASE("sieve recovers noiseless square data") {
  const auto data = measurements(Body(benchmark_truth("square", 2, 1.0)), evenly_spaced_circle(64), 0.0, 1.0, 1);
  SieveConfig cfg;
  cfg.m = 4;
  cfg.restarts = 20;
  const FitResult fit = fit_sieve_polytope(data, cfg, 7);
  double best = 1e300;
  for (const auto& trace : fit.diagnostics.restart_traces) best = std::min(best, trace.back());
  CHECK(best <= 1e-6);
  CHECK(fit.objective <= 1e-6);
}

TEST_CASE("sieve objective never increases") {
  Rng rng(15);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 2 + trial % 2;
    std::vector<Direction> dirs;
    for (int i = 0; i < 200; ++i) dirs.push_back(uniform_direction(rng, d));
    const Body truth = d == 2 ? Body(benchmark_truth("ball", 2, 1.0)) : Body(benchmark_truth("simplex", 3, 1.0));
    const auto data = measurements(truth, dirs, 0.1, 1.0, derive_seed(15, trial));
    SieveConfig cfg;
    cfg.m = 3 + static_cast<std::size_t>(trial) * 2;
    cfg.restarts = 8;
    const FitResult fit = fit_sieve_polytope(data, cfg, static_cast<std::uint64_t>(trial));
    for (const auto& trace : fit.diagnostics.restart_traces) CHECK(non_increasing(trace));
    CHECK(fit.objective == doctest::Approx(fit.diagnostics.objective_trace.back()).epsilon(1e-12));
  }
}

TEST_CASE("sieve nested budgets with warm starts") {
  Rng rng(44);
  const auto data = measurements(Body(benchmark_truth("pentagon", 2, 1.0)), random_circle(rng, 150), 0.1, 1.0, 3);
  SieveConfig cfg;
  cfg.restarts = 5;
  cfg.m = 1;
  FitResult prev = fit_sieve_polytope(data, cfg, 0);
  for (std::size_t m = 2; m <= 10; ++m) {
    std::vector<Point> warm;
    for (std::size_t j = 0; j < prev.polytope.size(); ++j) warm.push_back(prev.polytope.vertex(j));
    cfg.m = m;
    cfg.warm_start = warm;
    const FitResult next = fit_sieve_polytope(data, cfg, m);
    CHECK(next.objective <= prev.objective + 1e-9);
    prev = next;
  }
}

TEST_CASE("sieve budget larger than n is clamped") {
  const auto data = measurements(Body(square()), evenly_spaced_circle(5), 0.0, 2.0, 1);
  SieveConfig cfg;
  cfg.m = 12;
  cfg.restarts = 2;
  const FitResult fit = fit_sieve_polytope(data, cfg, 1);
  CHECK(fit.polytope.size() <= 5);
  CHECK_FALSE(fit.diagnostics.warnings.empty());
  cfg.m = 0;
  CHECK_THROWS_AS(fit_sieve_polytope(data, cfg, 1), ParameterError);
}

TEST_CASE("sieve is deterministic for a fixed seed and any worker count") {
  Rng rng(8);
  const auto data = measurements(Body(benchmark_truth("square", 2, 1.0)), random_circle(rng, 300), 0.1, 1.0, 2);
  SieveConfig cfg;
  cfg.m = 7;
  cfg.restarts = 6;
  const FitResult a = fit_sieve_polytope(data, cfg, 99);
  cfg.workers = 3;
  const FitResult b = fit_sieve_polytope(data, cfg, 99);
  CHECK(a.objective == b.objective);
  CHECK(a.polytope.vertices() == b.polytope.vertices());
  CHECK(a.diagnostics.best_restart == b.diagnostics.best_restart);
}

TEST_CASE("estimators are scale equivariant") {
  Rng rng(71);
  const auto dirs = random_circle(rng, 40);
  const auto data = measurements(Body(benchmark_truth("pentagon", 2, 1.0)), dirs, 0.1, 1.0, 5);
  const double lambda = 3.5;
  MeasurementSet scaled = data;
  scaled.gamma *= lambda;
  for (double& y : scaled.values) y *= lambda;

  SieveConfig cfg;
  cfg.m = 6;
  cfg.restarts = 4;
  const FitResult s1 = fit_sieve_polytope(data, cfg, 3);
  const FitResult s2 = fit_sieve_polytope(scaled, cfg, 3);
  CHECK(s2.objective == doctest::Approx(lambda * lambda * s1.objective).epsilon(1e-9));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    CHECK(s2.fitted.values[i] == doctest::Approx(lambda * s1.fitted.values[i]).epsilon(1e-9));
  }

  const FitResult q1 = fit_ls_2d(data);
  const FitResult q2 = fit_ls_2d(scaled);
  CHECK(q2.objective == doctest::Approx(lambda * lambda * q1.objective).epsilon(1e-9));

  const FitResult f1 = fit_ls_full(data);
  const FitResult f2 = fit_ls_full(scaled);
  CHECK(f2.objective == doctest::Approx(lambda * lambda * f1.objective).epsilon(1e-6));

  std::vector<Polytope> fam1, fam2;
  for (double r : {0.3, 0.6, 0.9}) {
    fam1.push_back(regular_polygon(5, r, std::numbers::pi / 2));
    fam2.push_back(regular_polygon(5, lambda * r, std::numbers::pi / 2));
  }
  const FitResult n1 = fit_ls_net(data, fam1);
  const FitResult n2 = fit_ls_net(scaled, fam2);
  CHECK(n1.diagnostics.best_restart == n2.diagnostics.best_restart);
  CHECK(n2.objective == doctest::Approx(lambda * lambda * n1.objective).epsilon(1e-12));
}

TEST_CASE("net estimator") {
  const Polytope truth = benchmark_truth("square", 2, 1.0);
  const auto data = measurements(Body(truth), evenly_spaced_circle(30), 0.0, 1.0, 1);
  const std::vector<Polytope> fam{regular_polygon(3, 0.5), truth, regular_polygon(6, 0.7)};
  const FitResult fit = fit_ls_net(data, fam);
  CHECK(fit.objective == 0.0);
  CHECK(fit.diagnostics.best_restart == 1);

  const std::vector<Polytope> single{regular_polygon(3, 0.5)};
  CHECK(fit_ls_net(data, single).polytope.vertices() == single[0].vertices());
  CHECK_THROWS_AS(fit_ls_net(data, std::vector<Polytope>{}), ParameterError);

  // Ball data against a grid of radii: the objective is n (r - rho)^2.
  const auto ball = measurements(Body(CapBody(2, 0.63, {})), evenly_spaced_circle(50), 0.0, 1.0, 1);
  std::vector<Polytope> grid;
  for (double r : {0.2, 0.4, 0.6, 0.8}) {
    std::vector<Point> pts;
    for (const Direction& u : evenly_spaced_circle(720)) pts.push_back(r / std::cos(std::numbers::pi / 720) * u.coords());
    grid.emplace_back(pts);
  }
  CHECK(fit_ls_net(ball, grid).diagnostics.best_restart == 2);
}

TEST_CASE("vertex budget rule") {
  CHECK(choose_m(1024, 5, 1.0, 1.0, DesignSetting::Fixed) == 32);
  CHECK(choose_m(3125, 2, 0.3, 1.0, DesignSetting::Random) == 5);
  CHECK(choose_m(2, 2, 10.0, 0.1, DesignSetting::Fixed) == 1);
  CHECK(choose_m(100, 2, 0.0, 1.0, DesignSetting::Fixed) == 100);
  CHECK(choose_m(10, 2, 1e-4, 1.0, DesignSetting::Fixed) == 10);
  CHECK_THROWS_AS(choose_m(0, 2, 1.0, 1.0, DesignSetting::Fixed), ParameterError);
}
