#pragma once

// Assouad cap families: a ball with disjoint truncated caps indexed by binary
// labels, and the fixed-design cap-loss scaling experiment.

#include <cstdint>
#include <functional>
#include <vector>

#include "supportfit/geometry.hpp"
#include "supportfit/sphere.hpp"
#include "supportfit/stats.hpp"

namespace supportfit {

using Labels = std::vector<std::uint8_t>;

struct AssouadFamily {
  int dim = 0;
  double gamma = 1.0;
  double eta = 0.125;
  std::vector<Direction> axes;  ///< pairwise distance >= 2 sqrt(2 eta)
  PackingSet design;            ///< directions on which losses are evaluated

  std::size_t size() const { return axes.size(); }
  /// K(tau): cap j truncated iff tau_j = 0. Throws ParameterError on a label
  /// length mismatch.
  CapBody member(const Labels& tau) const;
};

/// Axes form a maximal 2 sqrt(2 eta)-packing. Throws ParameterError for eta
/// outside (0, 1/8] and MalformedInput if the design dimension differs.
AssouadFamily build_assouad_family(Rng& rng, int d, double gamma, double eta,
                                   PackingSet design);

/// Fixed-design loss between K(tau) and K(tau2) on the family's design.
double loss_between_labels(const AssouadFamily& fam, const Labels& tau, const Labels& tau2);

std::size_t hamming(const Labels& a, const Labels& b);

/// Loss between one truncated cap and the full ball, on `design`.
double unit_cap_loss(const std::vector<Direction>& design, double gamma, double eta,
                     const Direction& axis);

struct CapLossPoint {
  double eta = 0.0;
  double epsilon = 0.0;
  std::size_t n = 0;
  double unit_loss = 0.0;
};

struct CapLossScaling {
  std::vector<CapLossPoint> points;
  RateFit fit;  ///< log unit_loss against log eta, target (d + 3) / 2
};

using EpsilonRule = std::function<double(double eta)>;

/// Default design radius sqrt(eta) / 4.
double default_epsilon_rule(double eta);

/// For every eta builds a maximal epsilon-packing design (epsilon from
/// `eps_rule`), evaluates the unit cap loss about a uniformly drawn axis and
/// regresses log loss on log eta. Each eta uses its own derived seed.
CapLossScaling cap_loss_scaling(std::uint64_t seed, int d, double gamma,
                                const std::vector<double>& etas,
                                const EpsilonRule& eps_rule = default_epsilon_rule,
                                double tolerance = 0.2, int workers = 1);

}  // namespace supportfit
