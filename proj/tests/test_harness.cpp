#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "supportfit/errors.hpp"
#include "supportfit/harness.hpp"
#include "supportfit/sphere.hpp"

using namespace supportfit;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.n_grid = {32, 64, 128};
  s.reps = 6;
  s.estimator.restarts = 4;
  return s;
}

std::string csv(const std::vector<RiskEstimate>& cells) {
  std::ostringstream os;
  write_risk_csv(os, cells);
  return os.str();
}

}  // namespace

TEST_CASE("benchmark truths") {
  for (const char* name : {"square", "pentagon", "segment", "ball"}) {
    const Polytope p = benchmark_truth(name, 2, 2.0);
    CHECK(p.max_vertex_norm() == doctest::Approx(1.4));
  }
  CHECK(benchmark_truth("simplex", 3, 1.0).size() == 4);
  CHECK(benchmark_truth("simplex", 3, 1.0).max_vertex_norm() == doctest::Approx(0.7));
  CHECK(benchmark_truth("square", 2, 1.0).size() == 4);
  CHECK_THROWS_AS(benchmark_truth("simplex", 2, 1.0), ParameterError);
  CHECK_THROWS_AS(benchmark_truth("hexagon", 2, 1.0), ParameterError);
  CHECK(ball_surrogate(3, 1.0).max_vertex_norm() == doctest::Approx(1.0));
  CHECK(benchmark_truth("ball", 3, 1.0).max_vertex_norm() == doctest::Approx(0.7));
  CHECK(benchmark_suite(2).size() == 4);
  CHECK(benchmark_suite(3).size() == 2);
}

TEST_CASE("data generation") {
  const Body truth = benchmark_truth("pentagon", 2, 1.0);
  const auto clean = generate_data(truth, DesignSpec{DesignKind::Uniform, 0.1}, 2, 50, 0.0, 1.0, 3);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CHECK(clean.values[i] == support(truth, clean.directions[i]));
  }
  const auto a = generate_data(truth, DesignSpec{DesignKind::Uniform, 0.1}, 2, 50, 0.3, 1.0, 9);
  const auto b = generate_data(truth, DesignSpec{DesignKind::Uniform, 0.1}, 2, 50, 0.3, 1.0, 9);
  CHECK(a.values == b.values);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.directions[i].coords() == b.directions[i].coords());

  const std::vector<Direction> one{Direction::normalized(Point::Ones(2))};
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 10000; ++s) sum += generate_data(truth, one, 0.5, 1.0, s).values[0];
  CHECK(std::abs(sum / 10000 - support(truth, one[0])) <= 3.0 * 0.5 / 100.0);

  CHECK_THROWS_AS(generate_data(benchmark_truth("square", 2, 2.0), one, 0.1, 1.0, 1), ValidationError);
  const auto pack = generate_data(truth, DesignSpec{DesignKind::Packing, 0.5}, 2, 0, 0.1, 1.0, 1);
  CHECK(min_pairwise_distance(pack.directions) >= 0.5 - kPackingSlack);
}

TEST_CASE("spec validation") {
  ExperimentSpec s = small_spec();
  CHECK_NOTHROW(s.validate());
  s.reps = 1;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = small_spec();
  s.n_grid = {64, 32};
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = small_spec();
  s.dim = 3;
  CHECK_THROWS_AS(s.validate(), MalformedInput);
  s = small_spec();
  s.truth = benchmark_truth("square", 2, 2.0);
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = small_spec();
  s.truth = CapBody(2, 1.0, {});
  s.loss = LossKind::Hausdorff;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = small_spec();
  s.design = {DesignKind::Packing, 0.2};
  CHECK_THROWS_AS(s.validate(), ParameterError);
  CHECK(small_spec().loss_kind() == LossKind::F);
  s = small_spec();
  s.setting = DesignSetting::Random;
  CHECK(s.loss_kind() == LossKind::R);
}

TEST_CASE("noiseless risk vanishes") {
  ExperimentSpec s = small_spec();
  s.sigma = 0.0;
  s.reps = 2;
  s.estimator.kind = EstimatorKind::Full;
  CHECK(estimate_risk(s, 40).mean <= 1e-8);

  s.estimator.kind = EstimatorKind::Sieve;
  s.estimator.m = 4;
  s.estimator.restarts = 20;
  for (std::size_t n : {64, 200}) CHECK(estimate_risk(s, n).mean <= 1e-6);

  s.estimator = {};
  s.estimator.kind = EstimatorKind::Net;
  s.estimator.net_radii = {0.3, 0.5, 0.7, 0.9};
  s.truth = ball_surrogate(2, 0.5);
  s.design = {DesignKind::Uniform, 0.1};
  s.setting = DesignSetting::Random;
  const RiskEstimate r = estimate_risk(s, 50);
  CHECK(r.loss_kind == LossKind::R);
  CHECK(r.mean == 0.0);
}

TEST_CASE("risk standard error shrinks with reps") {
  ExperimentSpec s = small_spec();
  s.estimator.kind = EstimatorKind::Qp2d;
  s.reps = 50;
  const double se50 = estimate_risk(s, 64).std_error;
  s.reps = 200;
  const double se200 = estimate_risk(s, 64).std_error;
  CHECK(se50 / se200 == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("sieve risk decreases along the grid") {
  ExperimentSpec s = small_spec();
  s.n_grid = {64, 256, 1024};
  s.reps = 20;
  const RateReport r = run_rate(s, 0.15);
  for (std::size_t k = 1; k < r.cells.size(); ++k) {
    const auto& a = r.cells[k - 1];
    const auto& b = r.cells[k];
    CHECK(b.mean <= a.mean + 2.0 * std::hypot(a.std_error, b.std_error));
  }
}

TEST_CASE("hausdorff and random-design losses") {
  ExperimentSpec s = small_spec();
  s.reps = 3;
  s.loss = LossKind::Hausdorff;
  const RiskEstimate h = estimate_risk(s, 64);
  CHECK(h.loss_kind == LossKind::Hausdorff);
  CHECK(h.mean > 0.0);
  s.loss = LossKind::F;
  CHECK(estimate_risk(s, 64).mean <= h.mean);

  s.loss.reset();
  s.setting = DesignSetting::Random;
  s.design = {DesignKind::Uniform, 0.1};
  s.loss_mc = 2000;
  const RiskEstimate r = estimate_risk(s, 64);
  CHECK(r.loss_kind == LossKind::R);
  CHECK(r.mean > 0.0);
}

TEST_CASE("suite risk reports the worst truth") {
  ExperimentSpec s = small_spec();
  s.reps = 3;
  const SuiteRisk r = estimate_suite_risk(s, 64);
  REQUIRE(r.per_truth.size() == 4);
  double worst = 0.0;
  for (const auto& [name, est] : r.per_truth) worst = std::max(worst, est.mean);
  CHECK(r.worst.mean == worst);
  bool found = false;
  for (const auto& [name, est] : r.per_truth) found = found || (name == r.worst_truth && est.mean == worst);
  CHECK(found);
}

TEST_CASE("rate pipeline is independent of the worker count") {
  ExperimentSpec s = small_spec();
  s.setting = DesignSetting::Random;
  s.design = {DesignKind::Uniform, 0.1};
  s.loss_mc = 500;
  const std::string one = csv(run_rate(s, 0.15).cells);
  s.workers = 4;
  const std::string four = csv(run_rate(s, 0.15).cells);
  CHECK(one == four);
  s.master_seed = 2;
  CHECK(csv(run_rate(s, 0.15).cells) != one);
}

TEST_CASE("rate fits") {
  std::vector<std::pair<double, double>> pts;
  for (double n : {64.0, 128.0, 256.0, 512.0}) pts.emplace_back(n, 3.0 * std::pow(n, -0.8));
  const RateFit f = fit_rate(pts, -0.8, 0.15);
  CHECK(std::abs(f.slope + 0.8) <= 1e-12);
  CHECK(f.pass);

  for (auto& p : pts) p.second = 0.25;
  CHECK(std::abs(fit_rate(pts, -0.8, 0.15).slope) <= 1e-12);
  CHECK_FALSE(fit_rate(pts, -0.8, 0.15).pass);

  pts.emplace_back(1024.0, 0.0);
  const RateFit dropped = fit_rate(pts, -0.8, 0.15);
  CHECK(dropped.points_used == 4);
  CHECK(dropped.warnings.size() == 1);
  pts = {{1.0, 1.0}, {2.0, -1.0}, {3.0, 0.5}};
  CHECK_THROWS_AS(fit_rate(pts, -0.8, 0.15), ParameterError);

  CHECK(rate_exponent(2) == doctest::Approx(-0.8));
  CHECK(rate_exponent(3) == doctest::Approx(-2.0 / 3.0));
}

TEST_CASE("risk csv and summary formats") {
  RiskEstimate a;
  a.n = 64;
  a.mean = 0.5;
  a.std_error = 0.125;
  a.reps = 10;
  CHECK(csv({a}) == "n,loss_kind,mean,stderr,reps\n64,f,0.5,0.125,10\n");
  RateFit f;
  f.slope = -0.75;
  f.target_exponent = -0.8;
  f.pass = true;
  CHECK(rate_summary(f) == "slope=-0.75, target=-0.8, pass=true");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
