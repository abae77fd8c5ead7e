#pragma once

// Direction designs on the unit sphere and Monte Carlo cap measures.

#include <cstddef>
#include <vector>

#include "supportfit/geometry.hpp"
#include "supportfit/rng.hpp"

namespace supportfit {

/// Uniform draw on S^{d-1}: a standard normal vector, normalized.
Direction uniform_direction(Rng& rng, int d);

/// Angles 2 pi k / n, k = 0..n-1, on the unit circle.
std::vector<Direction> evenly_spaced_circle(std::size_t n);

/// Pairwise-separated directions. `min_separation` is the slack-adjusted
/// packing radius: every pair is at Euclidean distance >= epsilon - 1e-12.
struct PackingSet {
  int dim = 0;
  double epsilon = 0.0;
  std::vector<Direction> points;
  std::size_t saturation = 0;  ///< consecutive rejections required to stop
  bool saturated = false;      ///< the rejection-saturation rule fired

  std::size_t size() const { return points.size(); }
};

inline constexpr double kPackingSlack = 1e-12;

/// Default saturation count 200 * eps^(1-d), capped at 10^6.
std::size_t default_saturation(int d, double epsilon);

/// Greedy maximal epsilon-packing. Uniform candidates are accepted iff they
/// are at distance >= epsilon from every accepted point; construction stops
/// after `saturation` consecutive rejections. On the circle (d = 2) the greedy
/// pass first sweeps around from a random start angle at chord spacing
/// epsilon, which already yields a maximal packing; the random phase then only
/// confirms saturation. Throws ParameterError for epsilon outside (0, 2] or
/// saturation < 1.
PackingSet maximal_packing(Rng& rng, int d, double epsilon, std::size_t saturation);
PackingSet maximal_packing(Rng& rng, int d, double epsilon);

/// Smallest pairwise distance (infinity for fewer than 2 points).
double min_pairwise_distance(const std::vector<Direction>& points);

/// Monte Carlo estimate of nu_unif(Cap(e_1, delta)), the uniform measure of
/// the unit vectors within Euclidean distance delta of e_1.
/// Throws ParameterError for delta outside (0, 2] or n_mc < 100.
McEstimate cap_measure_mc(Rng& rng, int d, double delta, std::size_t n_mc);

struct CapCount {
  std::size_t count = 0;
  /// Set when the cap-count bound's hypotheses (eps <= delta/2, delta <= 4/5)
  /// do not hold.
  bool outside_bound_range = false;
};

/// Number of packing points within Euclidean distance delta of v.
CapCount count_packing_in_cap(const PackingSet& pack, const Direction& v, double delta);

}  // namespace supportfit
