#include "supportfit/lower_bound.hpp"

#include <cmath>

#include "supportfit/errors.hpp"
#include "supportfit/parallel.hpp"

namespace supportfit {

namespace {

void require_eta(double eta) {
  if (!(eta > 0.0 && eta <= 0.125)) {
    throw ParameterError("eta must lie in (0, 1/8], got " + std::to_string(eta));
  }
}

}  // namespace

CapBody AssouadFamily::member(const Labels& tau) const {
  if (tau.size() != axes.size()) {
    throw ParameterError("label length " + std::to_string(tau.size()) + " != family size " +
                         std::to_string(axes.size()));
  }
  std::vector<Cap> caps;
  caps.reserve(axes.size());
  for (std::size_t j = 0; j < axes.size(); ++j) caps.push_back({axes[j], eta, tau[j] == 0});
  return CapBody(dim, gamma, std::move(caps));
}

AssouadFamily build_assouad_family(Rng& rng, int d, double gamma, double eta,
                                   PackingSet design) {
  require_eta(eta);
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (design.dim != d) throw MalformedInput("design dimension differs from family dimension");
  AssouadFamily fam;
  fam.dim = d;
  fam.gamma = gamma;
  fam.eta = eta;
  fam.axes = maximal_packing(rng, d, 2.0 * std::sqrt(2.0 * eta)).points;
  fam.design = std::move(design);
  return fam;
}

std::size_t hamming(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) throw ParameterError("labels have different lengths");
  std::size_t h = 0;
  for (std::size_t i = 0; i < a.size(); ++i) h += (a[i] != 0) != (b[i] != 0);
  return h;
}

double loss_between_labels(const AssouadFamily& fam, const Labels& tau, const Labels& tau2) {
  const Body a = fam.member(tau);
  const Body b = fam.member(tau2);
  return loss_f(sample_support(a, fam.design.points), sample_support(b, fam.design.points));
}

double unit_cap_loss(const std::vector<Direction>& design, double gamma, double eta,
                     const Direction& axis) {
  require_eta(eta);
  const Body truncated = CapBody(axis.dim(), gamma, {Cap{axis, eta, true}});
  const Body ball = CapBody(axis.dim(), gamma, {});
  return loss_f(sample_support(truncated, design), sample_support(ball, design));
}

double default_epsilon_rule(double eta) { return std::sqrt(eta) / 4.0; }

CapLossScaling cap_loss_scaling(std::uint64_t seed, int d, double gamma,
                                const std::vector<double>& etas, const EpsilonRule& eps_rule,
                                double tolerance, int workers) {
  for (double eta : etas) require_eta(eta);
  CapLossScaling out;
  out.points.resize(etas.size());
  parallel_for(etas.size(), workers, [&](std::size_t k) {
    Rng rng(derive_seed(seed, k));
    const double eps = eps_rule(etas[k]);
    const PackingSet design = maximal_packing(rng, d, eps);
    const Direction axis = uniform_direction(rng, d);
    out.points[k] = {etas[k], eps, design.size(),
                     unit_cap_loss(design.points, gamma, etas[k], axis)};
  });
  std::vector<double> x, y;
  for (const auto& p : out.points) {
    x.push_back(p.eta);
    y.push_back(p.unit_loss);
  }
  out.fit = fit_log_log(x, y, (d + 3) / 2.0, tolerance);
  return out;
}

}  // namespace supportfit
