#include "supportfit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

#include "supportfit/errors.hpp"
#include "supportfit/parallel.hpp"
#include "supportfit/sphere.hpp"

namespace supportfit {

Polytope regular_polygon(std::size_t k, double radius, double phase) {
  if (k < 1) throw ParameterError("polygon needs at least one vertex");
  std::vector<Point> pts;
  for (std::size_t j = 0; j < k; ++j) {
    const double t = phase + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(k);
    Point p(2);
    p << radius * std::cos(t), radius * std::sin(t);
    pts.push_back(p);
  }
  return Polytope(pts);
}

Polytope ball_surrogate(int d, double radius) {
  if (d < 2) throw ParameterError("ball surrogate needs d >= 2");
  if (d == 2) return regular_polygon(64, radius);
  Rng rng(derive_seed(0x5eed, static_cast<std::uint64_t>(d)));
  const PackingSet pack = maximal_packing(rng, d, 0.35, 20000);
  std::vector<Point> pts;
  for (const Direction& u : pack.points) pts.push_back(radius * u.coords());
  return Polytope(pts);
}

Polytope benchmark_truth(const std::string& name, int d, double gamma) {
  const double r = 0.7 * gamma;
  if (name == "ball") return ball_surrogate(d, r);
  if (name == "simplex") {
    if (d != 3) throw ParameterError("simplex truth is three-dimensional");
    std::vector<Point> pts;
    for (const auto& v : {Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, -1, -1),
                          Eigen::Vector3d(-1, 1, -1), Eigen::Vector3d(-1, -1, 1)}) {
      pts.push_back(Point(v * (r / std::sqrt(3.0))));
    }
    return Polytope(pts);
  }
  if (d != 2) throw ParameterError("benchmark truth '" + name + "' is planar");
  if (name == "square") return regular_polygon(4, r, std::numbers::pi / 4.0);
  if (name == "pentagon") return regular_polygon(5, r, std::numbers::pi / 2.0);
  if (name == "segment") return regular_polygon(2, r);
  throw ParameterError("unknown benchmark truth '" + name + "'");
}

std::vector<std::string> benchmark_suite(int d) {
  if (d == 2) return {"square", "pentagon", "segment", "ball"};
  if (d == 3) return {"simplex", "ball"};
  return {"ball"};
}

LossKind ExperimentSpec::loss_kind() const {
  if (loss) return *loss;
  return setting == DesignSetting::Fixed ? LossKind::F : LossKind::R;
}

void ExperimentSpec::validate() const {
  if (dim < 2) throw ParameterError("dimension must be >= 2");
  if (body_dim(truth) != dim) throw MalformedInput("truth dimension differs from spec dimension");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be nonnegative");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (reps < 2) throw ParameterError("reps must be >= 2");
  if (n_grid.empty()) throw ParameterError("n grid is empty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 1) throw ParameterError("sample sizes must be >= 1");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) {
      throw ParameterError("n grid must be strictly increasing");
    }
  }
  if (design.kind == DesignKind::Even2d && dim != 2) {
    throw ParameterError("even2d design needs d = 2");
  }
  if (design.kind == DesignKind::Packing && n_grid.size() > 1) {
    throw ParameterError("packing design fixes n; use a single-entry grid");
  }
  if (estimator.kind == EstimatorKind::Qp2d && dim != 2) {
    throw ParameterError("qp2d estimator needs d = 2");
  }
  if (estimator.kind == EstimatorKind::Net && estimator.net_radii.empty()) {
    throw ParameterError("net estimator needs a radius grid");
  }
  if (loss_kind() == LossKind::Hausdorff && !std::holds_alternative<Polytope>(truth)) {
    throw ParameterError("Hausdorff loss needs a polytope truth");
  }
  if (body_radius(truth) > gamma + kRadiusSlack) {
    throw ValidationError("truth is not contained in B(0, gamma)");
  }
}

std::vector<Direction> draw_design(const DesignSpec& design, int d, std::size_t n, Rng& rng) {
  switch (design.kind) {
    case DesignKind::Even2d:
      if (d != 2) throw ParameterError("even2d design needs d = 2");
      return evenly_spaced_circle(n);
    case DesignKind::Packing:
      return maximal_packing(rng, d, design.epsilon).points;
    case DesignKind::Uniform:
      break;
  }
  std::vector<Direction> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(uniform_direction(rng, d));
  return out;
}

MeasurementSet generate_data(const Body& truth, std::vector<Direction> directions,
                             double sigma, double gamma, std::uint64_t seed) {
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be nonnegative");
  if (body_radius(truth) > gamma + kRadiusSlack) {
    throw ValidationError("truth is not contained in B(0, gamma)");
  }
  MeasurementSet data;
  data.sigma = sigma;
  data.gamma = gamma;
  data.values.reserve(directions.size());
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (const Direction& u : directions) {
    const double xi = noise(rng);
    data.values.push_back(support(truth, u) + sigma * xi);
  }
  data.directions = std::move(directions);
  data.validate();
  return data;
}

MeasurementSet generate_data(const Body& truth, const DesignSpec& design, int d,
                             std::size_t n, double sigma, double gamma, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 1));
  auto dirs = draw_design(design, d, n, rng);
  return generate_data(truth, std::move(dirs), sigma, gamma, derive_seed(seed, 2));
}

FitResult run_estimator(const EstimatorSpec& est, const MeasurementSet& data,
                        DesignSetting setting, std::uint64_t seed) {
  switch (est.kind) {
    case EstimatorKind::Full:
      return fit_ls_full(data, est.qp);
    case EstimatorKind::Qp2d:
      return fit_ls_2d(data, est.qp);
    case EstimatorKind::Net: {
      std::vector<Polytope> family;
      const Polytope unit = ball_surrogate(data.dim(), 1.0);
      for (double r : est.net_radii) family.emplace_back(Eigen::MatrixXd(r * unit.vertices()));
      return fit_ls_net(data, family);
    }
    case EstimatorKind::Sieve:
      break;
  }
  SieveConfig cfg;
  cfg.m = est.m ? *est.m
                : choose_m(data.size(), data.dim(), data.sigma, data.gamma, setting);
  cfg.restarts = est.restarts;
  cfg.max_rounds = est.max_rounds;
  cfg.ridge = est.ridge;
  cfg.project_to_ball = est.project_to_ball;
  return fit_sieve_polytope(data, cfg, seed);
}

namespace {

struct TrialOutcome {
  double loss = 0.0;
  bool certified = true;
};

TrialOutcome run_trial(const ExperimentSpec& spec, std::size_t n, std::size_t rep,
                       const std::vector<Direction>* fixed_design) {
  const std::uint64_t trial_seed = derive_seed(spec.master_seed, n, rep + 1);
  std::vector<Direction> dirs;
  if (fixed_design) {
    dirs = *fixed_design;
  } else {
    Rng rng(derive_seed(trial_seed, 1));
    dirs = draw_design(spec.design, spec.dim, n, rng);
  }
  const MeasurementSet data =
      generate_data(spec.truth, dirs, spec.sigma, spec.gamma, derive_seed(trial_seed, 2));
  const FitResult fit =
      run_estimator(spec.estimator, data, spec.setting, derive_seed(trial_seed, 3));

  TrialOutcome out;
  out.certified = fit.diagnostics.certified;
  switch (spec.loss_kind()) {
    case LossKind::F:
      out.loss = loss_f(sample_support(spec.truth, data.directions), fit.fitted);
      break;
    case LossKind::R: {
      Rng rng(derive_seed(trial_seed, 4));
      std::vector<Direction> fresh;
      fresh.reserve(spec.loss_mc);
      for (std::size_t i = 0; i < spec.loss_mc; ++i) fresh.push_back(uniform_direction(rng, spec.dim));
      out.loss = loss_r_on_sample(spec.truth, Body(fit.polytope), fresh).estimate;
      break;
    }
    case LossKind::Hausdorff: {
      const double h = hausdorff_polytopes(std::get<Polytope>(spec.truth), fit.polytope);
      out.loss = h * h;
      break;
    }
  }
  return out;
}

std::vector<Direction> fixed_design_for(const ExperimentSpec& spec, std::size_t n) {
  Rng rng(derive_seed(spec.master_seed, n, 0));
  return draw_design(spec.design, spec.dim, n, rng);
}

RiskEstimate summarize(const ExperimentSpec& spec, std::size_t n,
                       const std::vector<TrialOutcome>& trials) {
  std::vector<double> losses;
  losses.reserve(trials.size());
  RiskEstimate est;
  est.n = n;
  est.loss_kind = spec.loss_kind();
  est.reps = static_cast<int>(trials.size());
  for (const auto& t : trials) {
    losses.push_back(t.loss);
    if (!t.certified) ++est.uncertified;
  }
  const MeanStderr ms = mean_stderr(losses);
  est.mean = ms.mean;
  est.std_error = ms.std_error;
  return est;
}

}  // namespace

RiskEstimate estimate_risk(const ExperimentSpec& spec, std::size_t n) {
  spec.validate();
  std::optional<std::vector<Direction>> fixed;
  if (spec.setting == DesignSetting::Fixed) fixed = fixed_design_for(spec, n);
  std::vector<TrialOutcome> trials(static_cast<std::size_t>(spec.reps));
  parallel_for(trials.size(), spec.workers, [&](std::size_t r) {
    trials[r] = run_trial(spec, n, r, fixed ? &*fixed : nullptr);
  });
  return summarize(spec, n, trials);
}

SuiteRisk estimate_suite_risk(const ExperimentSpec& spec, std::size_t n) {
  SuiteRisk out;
  for (const std::string& name : benchmark_suite(spec.dim)) {
    ExperimentSpec s = spec;
    s.truth = benchmark_truth(name, spec.dim, spec.gamma);
    RiskEstimate r = estimate_risk(s, n);
    if (out.per_truth.empty() || r.mean > out.worst.mean) {
      out.worst = r;
      out.worst_truth = name;
    }
    out.per_truth.emplace_back(name, r);
  }
  return out;
}

double rate_exponent(int d) { return -4.0 / static_cast<double>(d + 3); }

RateFit fit_rate(const std::vector<std::pair<double, double>>& points, double target,
                 double tolerance) {
  std::vector<double> x, y;
  for (const auto& [n, mean] : points) {
    x.push_back(n);
    y.push_back(mean);
  }
  return fit_log_log(x, y, target, tolerance);
}

RateReport run_rate(const ExperimentSpec& spec, double tolerance) {
  spec.validate();
  const std::size_t cells = spec.n_grid.size();
  const auto reps = static_cast<std::size_t>(spec.reps);
  std::vector<std::optional<std::vector<Direction>>> designs(cells);
  if (spec.setting == DesignSetting::Fixed) {
    for (std::size_t c = 0; c < cells; ++c) designs[c] = fixed_design_for(spec, spec.n_grid[c]);
  }
  std::vector<TrialOutcome> trials(cells * reps);
  // Largest cells first keeps the pool busy at the end of the run.
  parallel_for(trials.size(), spec.workers, [&](std::size_t k) {
    const std::size_t c = cells - 1 - k / reps;
    const std::size_t r = k % reps;
    trials[c * reps + r] =
        run_trial(spec, spec.n_grid[c], r, designs[c] ? &*designs[c] : nullptr);
  });

  RateReport report;
  std::vector<std::pair<double, double>> points;
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<TrialOutcome> cell(trials.begin() + static_cast<std::ptrdiff_t>(c * reps),
                                   trials.begin() + static_cast<std::ptrdiff_t>((c + 1) * reps));
    report.cells.push_back(summarize(spec, spec.n_grid[c], cell));
    points.emplace_back(static_cast<double>(spec.n_grid[c]), report.cells.back().mean);
  }
  report.fit = fit_rate(points, rate_exponent(spec.dim), tolerance);
  return report;
}

std::string loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::F:
      return "f";
    case LossKind::R:
      return "r";
    case LossKind::Hausdorff:
      return "hausdorff";
  }
  return "f";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_risk_csv(std::ostream& os, const std::vector<RiskEstimate>& cells) {
  os << "n,loss_kind,mean,stderr,reps\n";
  for (const auto& c : cells) {
    os << c.n << ',' << loss_kind_name(c.loss_kind) << ',' << format_double(c.mean) << ','
       << format_double(c.std_error) << ',' << c.reps << '\n';
  }
}

std::string rate_summary(const RateFit& fit) {
  return "slope=" + format_double(fit.slope) + ", target=" + format_double(fit.target_exponent) +
         ", pass=" + (fit.pass ? "true" : "false");
}

}  // namespace supportfit
