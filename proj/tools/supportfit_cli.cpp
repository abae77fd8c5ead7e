// Command-line driver. Every subcommand accepts `--config FILE`, an INI file
// whose [subcommand] sections hold `key = value` pairs named like the long
// flags; flags given on the command line override the file.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "supportfit/errors.hpp"
#include "supportfit/harness.hpp"
#include "supportfit/io.hpp"
#include "supportfit/lower_bound.hpp"
#include "supportfit/sphere.hpp"

using namespace supportfit;

namespace {

constexpr int kExitError = 1;
constexpr int kExitGateFailed = 2;

const std::map<std::string, DesignKind> kDesigns{
    {"uniform", DesignKind::Uniform}, {"even2d", DesignKind::Even2d}, {"packing", DesignKind::Packing}};
const std::map<std::string, DesignSetting> kSettings{
    {"fixed", DesignSetting::Fixed}, {"random", DesignSetting::Random}};
const std::map<std::string, EstimatorKind> kEstimators{{"full", EstimatorKind::Full},
                                                       {"qp2d", EstimatorKind::Qp2d},
                                                       {"sieve", EstimatorKind::Sieve},
                                                       {"net", EstimatorKind::Net}};
const std::map<std::string, LossKind> kLosses{
    {"f", LossKind::F}, {"r", LossKind::R}, {"hausdorff", LossKind::Hausdorff}};

// Writes through `fn` to `path`, or to stdout for "-".
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedInput("cannot write " + path);
  fn(out);
  if (!out) throw MalformedInput("write failed: " + path);
}

// A benchmark name or a JSON body file.
Body resolve_truth(const std::string& truth, int d, double gamma) {
  if (std::filesystem::exists(truth)) return read_body_file(truth);
  return benchmark_truth(truth, d, gamma);
}

struct EstimatorFlags {
  std::string kind = "sieve";
  std::size_t m = 0;  // 0: choose_m
  int restarts = 20;
  int max_rounds = 200;
  double kkt_tol = 1e-8;
  std::vector<double> net_radii;

  void attach(CLI::App* sub) {
    sub->add_option("--estimator", kind, "full, qp2d, sieve or net")
        ->check(CLI::IsMember({"full", "qp2d", "sieve", "net"}))
        ->capture_default_str();
    sub->add_option("--m", m, "sieve vertex budget (0 picks it from n)")->capture_default_str();
    sub->add_option("--restarts", restarts, "sieve restarts")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--max-rounds", max_rounds, "sieve rounds per restart")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--kkt-tol", kkt_tol, "QP certification tolerance")->capture_default_str();
    sub->add_option("--net-radii", net_radii, "net estimator: radii of ball surrogates")->delimiter(',');
  }

  EstimatorSpec spec() const {
    EstimatorSpec e;
    e.kind = kEstimators.at(kind);
    e.restarts = restarts;
    e.max_rounds = max_rounds;
    e.qp.kkt_tol = kkt_tol;
    if (m > 0) e.m = m;
    e.net_radii = net_radii;
    return e;
  }
};

struct ExperimentFlags {
  int dim = 2;
  std::string truth = "square";
  std::string design = "even2d";
  double design_epsilon = 0.1;
  std::string setting = "fixed";
  double sigma = 0.1;
  double gamma = 1.0;
  std::vector<std::size_t> n_grid{64, 128, 256, 512, 1024, 2048, 4096};
  int reps = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t loss_mc = 10000;
  std::string loss;
  EstimatorFlags est;

  void attach(CLI::App* sub) {
    sub->add_option("--dim", dim, "dimension d")->check(CLI::Range(2, 64))->capture_default_str();
    sub->add_option("--truth", truth, "benchmark name, JSON body file, or 'suite'")->capture_default_str();
    sub->add_option("--design", design, "uniform, even2d or packing")
        ->check(CLI::IsMember({"uniform", "even2d", "packing"}))
        ->capture_default_str();
    sub->add_option("--design-epsilon", design_epsilon, "packing design radius")->capture_default_str();
    sub->add_option("--setting", setting, "fixed or random design")
        ->check(CLI::IsMember({"fixed", "random"}))
        ->capture_default_str();
    sub->add_option("--sigma", sigma, "noise standard deviation")->capture_default_str();
    sub->add_option("--gamma", gamma, "radius bound")->capture_default_str();
    sub->add_option("--n-grid", n_grid, "sample sizes")->delimiter(',')->capture_default_str();
    sub->add_option("--reps", reps, "Monte Carlo repetitions")->capture_default_str();
    sub->add_option("--seed", seed, "master seed")->capture_default_str();
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--loss-mc", loss_mc, "fresh directions for the random-design loss")->capture_default_str();
    sub->add_option("--loss", loss, "f, r or hausdorff (default from the setting)")
        ->check(CLI::IsMember({"f", "r", "hausdorff"}));
    est.attach(sub);
  }

  bool suite() const { return truth == "suite"; }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    s.dim = dim;
    s.gamma = gamma;
    s.truth = suite() ? Body(benchmark_truth(benchmark_suite(dim).front(), dim, gamma))
                      : resolve_truth(truth, dim, gamma);
    s.design = {kDesigns.at(design), design_epsilon};
    s.setting = kSettings.at(setting);
    s.sigma = sigma;
    s.n_grid = n_grid;
    s.reps = reps;
    s.estimator = est.spec();
    s.master_seed = seed;
    s.workers = workers;
    s.loss_mc = loss_mc;
    if (!loss.empty()) s.loss = kLosses.at(loss);
    return s;
  }
};

void warn_uncertified(const std::vector<RiskEstimate>& cells) {
  for (const auto& c : cells) {
    if (c.uncertified > 0) {
      std::cerr << "warning: n=" << c.n << ": " << c.uncertified << " of " << c.reps
                << " fits not certified\n";
    }
  }
}

// Risk per grid cell; for the suite, the worst benchmark truth per cell.
std::vector<RiskEstimate> risk_cells(const ExperimentFlags& f, const ExperimentSpec& spec) {
  std::vector<RiskEstimate> cells;
  if (!f.suite()) {
    for (std::size_t n : spec.n_grid) cells.push_back(estimate_risk(spec, n));
    return cells;
  }
  for (std::size_t n : spec.n_grid) {
    const SuiteRisk r = estimate_suite_risk(spec, n);
    std::cerr << "n=" << n << ": worst truth " << r.worst_truth << '\n';
    cells.push_back(r.worst);
  }
  return cells;
}

int cmd_simulate(int dim, const std::string& truth, const std::string& design, double design_eps,
                 std::size_t n, double sigma, double gamma, std::uint64_t seed, const std::string& out) {
  const Body k = resolve_truth(truth, dim, gamma);
  const MeasurementSet data =
      generate_data(k, DesignSpec{kDesigns.at(design), design_eps}, dim, n, sigma, gamma, seed);
  emit(out, [&](std::ostream& os) { write_measurements_csv(os, data); });
  return 0;
}

int cmd_fit(const std::string& input, const EstimatorFlags& ef, double sigma, double gamma,
            std::uint64_t seed, int workers, const std::string& family, const std::string& out) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw MalformedInput("cannot open " + input);
  const MeasurementSet data = read_measurements_csv(in, sigma, gamma);
  data.validate();

  const auto solve = [&]() -> FitResult {
    switch (kEstimators.at(ef.kind)) {
      case EstimatorKind::Full:
        return fit_ls_full(data, ef.spec().qp);
      case EstimatorKind::Qp2d:
        return fit_ls_2d(data, ef.spec().qp);
      case EstimatorKind::Sieve: {
        SieveConfig cfg;
        cfg.m = ef.m > 0 ? ef.m : choose_m(data.size(), data.dim(), sigma, gamma, DesignSetting::Fixed);
        cfg.restarts = ef.restarts;
        cfg.max_rounds = ef.max_rounds;
        cfg.workers = workers;
        return fit_sieve_polytope(data, cfg, seed);
      }
      case EstimatorKind::Net:
        break;
    }
    std::vector<Polytope> fam;
    if (!family.empty()) {
      fam = family_from_json(read_json_file(family));
    } else {
      for (double r : ef.net_radii) fam.push_back(ball_surrogate(data.dim(), r));
    }
    return fit_ls_net(data, fam);
  };
  const FitResult fit = solve();
  if (!fit.diagnostics.certified) std::cerr << "warning: solver did not certify the fit\n";
  emit(out, [&](std::ostream& os) { os << fit_result_to_json(fit).dump(2) << '\n'; });
  return 0;
}

int cmd_risk(const ExperimentFlags& f, const std::string& out) {
  const ExperimentSpec spec = f.spec();
  const auto cells = risk_cells(f, spec);
  warn_uncertified(cells);
  emit(out, [&](std::ostream& os) { write_risk_csv(os, cells); });
  return 0;
}

int cmd_rate(const ExperimentFlags& f, double tolerance, const std::string& out) {
  const ExperimentSpec spec = f.spec();
  RateReport report;
  if (f.suite()) {
    report.cells = risk_cells(f, spec);
    std::vector<std::pair<double, double>> pts;
    for (const auto& c : report.cells) pts.emplace_back(static_cast<double>(c.n), c.mean);
    report.fit = fit_rate(pts, rate_exponent(spec.dim), tolerance);
  } else {
    report = run_rate(spec, tolerance);
  }
  warn_uncertified(report.cells);
  for (const auto& w : report.fit.warnings) std::cerr << "warning: " << w << '\n';
  emit(out, [&](std::ostream& os) { write_risk_csv(os, report.cells); });
  std::cout << rate_summary(report.fit) << '\n';
  return report.fit.pass ? 0 : kExitGateFailed;
}

int cmd_assouad(int dim, double gamma, const std::vector<double>& etas, std::uint64_t seed,
                std::optional<double> tolerance, int workers, const std::string& out) {
  const double tol = tolerance.value_or(dim == 2 ? 0.2 : 0.25);
  const CapLossScaling s = cap_loss_scaling(seed, dim, gamma, etas, default_epsilon_rule, tol, workers);
  emit(out, [&](std::ostream& os) {
    os << "eta,epsilon,n,unit_loss\n";
    for (const auto& p : s.points) {
      os << format_double(p.eta) << ',' << format_double(p.epsilon) << ',' << p.n << ','
         << format_double(p.unit_loss) << '\n';
    }
  });
  std::cout << rate_summary(s.fit) << '\n';
  return s.fit.pass ? 0 : kExitGateFailed;
}

int cmd_pack(int dim, double epsilon, std::uint64_t seed, std::size_t saturation, const std::string& out) {
  Rng rng(seed);
  const PackingSet pack = saturation > 0 ? maximal_packing(rng, dim, epsilon, saturation)
                                         : maximal_packing(rng, dim, epsilon);
  if (!pack.saturated) std::cerr << "warning: saturation cap reached before the rejection rule fired\n";
  emit(out, [&](std::ostream& os) { os << packing_to_json(pack).dump(2) << '\n'; });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Support-function regression: estimators, experiments and lower-bound checks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file with [subcommand] sections of key = value pairs");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a measurement set and write it as CSV");
  int sim_dim = 2;
  std::string sim_truth = "square", sim_design = "uniform", sim_out = "measurements.csv";
  double sim_eps = 0.1, sim_sigma = 0.1, sim_gamma = 1.0;
  std::size_t sim_n = 100;
  std::uint64_t sim_seed = 1;
  sim->add_option("--dim", sim_dim, "dimension d")->check(CLI::Range(2, 64))->capture_default_str();
  sim->add_option("--truth", sim_truth, "benchmark name or JSON body file")->capture_default_str();
  sim->add_option("--design", sim_design, "uniform, even2d or packing")
      ->check(CLI::IsMember({"uniform", "even2d", "packing"}))
      ->capture_default_str();
  sim->add_option("--design-epsilon", sim_eps, "packing design radius")->capture_default_str();
  sim->add_option("--n", sim_n, "sample size (ignored by the packing design)")->capture_default_str();
  sim->add_option("--sigma", sim_sigma, "noise standard deviation")->capture_default_str();
  sim->add_option("--gamma", sim_gamma, "radius bound")->capture_default_str();
  sim->add_option("--seed", sim_seed, "seed")->capture_default_str();
  sim->add_option("--out", sim_out, "output CSV ('-' for stdout)")->capture_default_str();

  // fit
  auto* fit = app.add_subcommand("fit", "fit a polytope to a measurement CSV");
  EstimatorFlags fit_est;
  std::string fit_input, fit_out = "fit.json", fit_family;
  double fit_sigma = 0.1, fit_gamma = 1.0;
  std::uint64_t fit_seed = 1;
  int fit_workers = 1;
  fit->add_option("--input", fit_input, "measurement CSV (u_1..u_d, y)")->required();
  fit_est.attach(fit);
  fit->add_option("--sigma", fit_sigma, "noise level, used to pick m")->capture_default_str();
  fit->add_option("--gamma", fit_gamma, "radius bound")->capture_default_str();
  fit->add_option("--seed", fit_seed, "sieve seed")->capture_default_str();
  fit->add_option("--workers", fit_workers, "worker threads for sieve restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--family", fit_family, "net estimator: JSON array of polytope bodies");
  fit->add_option("--out", fit_out, "output JSON ('-' for stdout)")->capture_default_str();

  // risk
  auto* risk = app.add_subcommand("risk", "Monte Carlo risk on a grid of sample sizes");
  ExperimentFlags risk_flags;
  std::string risk_out = "risk.csv";
  risk_flags.attach(risk);
  risk->add_option("--out", risk_out, "output CSV ('-' for stdout)")->capture_default_str();

  // rate
  auto* rate = app.add_subcommand("rate", "risk grid plus a log-log slope check");
  ExperimentFlags rate_flags;
  std::string rate_out = "rate.csv";
  double rate_tol = 0.15;
  rate_flags.attach(rate);
  rate->add_option("--tolerance", rate_tol, "allowed |slope - target|")->capture_default_str();
  rate->add_option("--out", rate_out, "output CSV ('-' for stdout)")->capture_default_str();

  // assouad
  auto* asd = app.add_subcommand("assouad", "cap-loss scaling over a grid of cap heights");
  int asd_dim = 2, asd_workers = 1;
  double asd_gamma = 1.0;
  std::vector<double> asd_etas{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::uint64_t asd_seed = 1;
  std::optional<double> asd_tol;
  std::string asd_out = "assouad.csv";
  asd->add_option("--dim", asd_dim, "dimension d")->check(CLI::Range(2, 64))->capture_default_str();
  asd->add_option("--gamma", asd_gamma, "ball radius")->capture_default_str();
  asd->add_option("--eta-grid", asd_etas, "cap heights in (0, 1/8]")->delimiter(',')->capture_default_str();
  asd->add_option("--seed", asd_seed, "seed")->capture_default_str();
  asd->add_option("--tolerance", asd_tol, "allowed |slope - target| (0.2 for d = 2, else 0.25)");
  asd->add_option("--workers", asd_workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  asd->add_option("--out", asd_out, "output CSV ('-' for stdout)")->capture_default_str();

  // pack
  auto* pack = app.add_subcommand("pack", "maximal epsilon-packing of the unit sphere");
  int pack_dim = 2;
  double pack_eps = 0.1;
  std::uint64_t pack_seed = 1;
  std::size_t pack_sat = 0;
  std::string pack_out = "packing.json";
  pack->add_option("--dim", pack_dim, "dimension d")->check(CLI::Range(2, 64))->capture_default_str();
  pack->add_option("--epsilon", pack_eps, "separation in (0, 2]")->capture_default_str();
  pack->add_option("--seed", pack_seed, "seed")->capture_default_str();
  pack->add_option("--saturation", pack_sat, "consecutive rejections that end the construction (0: default)")
      ->capture_default_str();
  pack->add_option("--out", pack_out, "output JSON ('-' for stdout)")->capture_default_str();

  for (auto* sub : {sim, fit, risk, rate, asd, pack}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }
  try {
    if (sim->parsed()) {
      return cmd_simulate(sim_dim, sim_truth, sim_design, sim_eps, sim_n, sim_sigma, sim_gamma, sim_seed, sim_out);
    }
    if (fit->parsed()) {
      return cmd_fit(fit_input, fit_est, fit_sigma, fit_gamma, fit_seed, fit_workers, fit_family, fit_out);
    }
    if (risk->parsed()) return cmd_risk(risk_flags, risk_out);
    if (rate->parsed()) return cmd_rate(rate_flags, rate_tol, rate_out);
    if (asd->parsed()) {
      return cmd_assouad(asd_dim, asd_gamma, asd_etas, asd_seed, asd_tol, asd_workers, asd_out);
    }
    if (pack->parsed()) return cmd_pack(pack_dim, pack_eps, pack_seed, pack_sat, pack_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
