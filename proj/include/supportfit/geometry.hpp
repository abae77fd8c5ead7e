#pragma once

// Support functions, distances and losses for the two body families used
// throughout the library: vertex-list polytopes and truncated balls.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "supportfit/stats.hpp"

namespace supportfit {

using Point = Eigen::VectorXd;

inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kDedupTolerance = 1e-12;
inline constexpr double kRadiusSlack = 1e-9;
inline constexpr double kCapAngleSlack = 1e-12;

/// A unit vector in R^d, d >= 2.
class Direction {
 public:
  /// Throws MalformedInput unless |coords| = 1 within 1e-12 and d >= 2.
  explicit Direction(Point coords);

  /// Normalizes `v`; throws MalformedInput for zero vectors or d < 2.
  static Direction normalized(const Point& v);

  int dim() const { return static_cast<int>(coords_.size()); }
  const Point& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  double dot(const Direction& other) const { return coords_.dot(other.coords_); }

 private:
  Point coords_;
};

/// Angle between two unit vectors, computed as atan2(|u - (u.v)v|, u.v) so that
/// small angles do not suffer acos cancellation.
double angle_between(const Direction& u, const Direction& v);

/// Convex hull of a finite point set, stored as its (deduplicated) generating
/// points. Interior generators are allowed; they never affect the support.
class Polytope {
 public:
  /// Throws MalformedInput for an empty list or ragged coordinates.
  explicit Polytope(std::span<const Point> points);
  /// Columns are points.
  explicit Polytope(const Eigen::MatrixXd& columns);

  int dim() const { return static_cast<int>(vertices_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(vertices_.cols()); }
  /// d x k matrix, one vertex per column.
  const Eigen::MatrixXd& vertices() const { return vertices_; }
  Point vertex(std::size_t j) const { return vertices_.col(static_cast<Eigen::Index>(j)); }

  double max_vertex_norm() const;
  /// Throws ValidationError if some vertex has norm > gamma + 1e-9.
  void require_within(double gamma) const;

 private:
  Eigen::MatrixXd vertices_;
};

struct Cap {
  Direction axis;
  double eta = 0.125;      ///< cos(alpha) = 1 - eta, eta in (0, 1/8]
  bool truncated = true;   ///< inactive caps are kept for bookkeeping only
};

/// The ball B(0, gamma) intersected with the halfspaces
/// {x : x.axis <= gamma (1 - eta)} of its truncated caps.
class CapBody {
 public:
  /// Throws ParameterError for gamma <= 0 or eta outside (0, 1/8], and
  /// MalformedInput if two truncated caps overlap (their angular radii add up
  /// to more than the angle between their axes) or dimensions disagree.
  CapBody(int dim, double gamma, std::vector<Cap> caps);

  int dim() const { return dim_; }
  double gamma() const { return gamma_; }
  const std::vector<Cap>& caps() const { return caps_; }

  /// Angular radius alpha of cap j: cos(alpha) = 1 - eta.
  double cap_angle(std::size_t j) const { return angles_[j]; }

 private:
  int dim_;
  double gamma_;
  std::vector<Cap> caps_;
  std::vector<double> angles_;
};

/// Angle alpha with cos(alpha) = 1 - eta, via atan2(sqrt(eta (2 - eta)), 1 - eta).
double cap_angle(double eta);

using Body = std::variant<Polytope, CapBody>;

int body_dim(const Body& body);
/// Radius of the smallest origin-centred ball known to contain the body.
double body_radius(const Body& body);

double support_polytope(const Polytope& p, const Direction& u);
double support_cap_body(const CapBody& b, const Direction& u);
double support(const Body& body, const Direction& u);

/// h_{full ball} - h_B(u) >= 0; zero outside every truncated cap.
double cap_deficit(const CapBody& b, const Direction& u);

/// Support values on a shared direction list.
struct SupportSamples {
  std::vector<Direction> directions;
  std::vector<double> values;

  /// Throws MalformedInput unless both lists have the same length >= 1.
  void validate() const;
  std::size_t size() const { return values.size(); }
};

SupportSamples sample_support(const Body& body, std::span<const Direction> directions);

/// Fixed-design loss: mean squared difference of the two value lists.
/// Throws MalformedInput when the direction lists differ.
double loss_f(const SupportSamples& a, const SupportSamples& b);

using DirectionSource = std::function<Direction()>;

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of the integrated squared support difference over the
/// directions produced by `nu`. Throws ParameterError for n_mc < 2.
McEstimate loss_r_mc(const Body& k1, const Body& k2, const DirectionSource& nu,
                     std::size_t n_mc);
/// Same estimator on an explicit sample (shared-sample comparisons).
McEstimate loss_r_on_sample(const Body& k1, const Body& k2,
                            std::span<const Direction> sample);

/// -16 sigma^2 log mean exp(-(h1 - h2)^2 / (16 sigma^2)) over `n_mc` draws.
/// Throws ParameterError for sigma <= 0 or n_mc < 1.
double loss_new(const Body& k1, const Body& k2, double sigma, const DirectionSource& nu,
                std::size_t n_mc);
double loss_new_on_sample(const Body& k1, const Body& k2, double sigma,
                          std::span<const Direction> sample);

/// Multiplier c(gamma, sigma) = (g / (4 s^2)) / (1 - exp(-g / (4 s^2))), g = gamma^2,
/// bounding loss_r <= c * loss_new for bodies inside B(0, gamma).
double loss_comparison_factor(double gamma, double sigma);

struct Projection {
  Point point;
  double distance = 0.0;
  double gap = 0.0;    ///< max_v (x - p).(v - p) over vertices v
  int iterations = 0;
};

/// Nearest point of conv(Q) to x (Wolfe's minimum-norm-point active-set method
/// on the translated vertices). Stops when the gap is <= gap_tol or after
/// max_iters major iterations.
Projection project_point_to_polytope(const Point& x, const Polytope& q,
                                     double gap_tol = 1e-10, int max_iters = 10000);

/// Exact Hausdorff distance between two polytopes: the largest vertex-to-hull
/// distance in either direction.
double hausdorff_polytopes(const Polytope& p, const Polytope& q);

}  // namespace supportfit
