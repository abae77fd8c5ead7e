#include "supportfit/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "supportfit/errors.hpp"

namespace supportfit {

Direction uniform_direction(Rng& rng, int d) {
  if (d < 2) throw ParameterError("uniform_direction needs d >= 2");
  std::normal_distribution<double> normal(0.0, 1.0);
  Point v(d);
  for (;;) {
    for (int i = 0; i < d; ++i) v[i] = normal(rng);
    const double norm = v.norm();
    if (norm > 1e-300) return Direction(v / norm);
  }
}

std::vector<Direction> evenly_spaced_circle(std::size_t n) {
  if (n < 1) throw ParameterError("evenly_spaced_circle needs n >= 1");
  std::vector<Direction> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    Point p(2);
    p << std::cos(t), std::sin(t);
    out.push_back(Direction::normalized(p));
  }
  return out;
}

std::size_t default_saturation(int d, double epsilon) {
  const double m = 200.0 * std::pow(epsilon, 1.0 - d);
  return static_cast<std::size_t>(std::clamp(std::ceil(m), 1.0, 1e6));
}

double min_pairwise_distance(const std::vector<Direction>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, (points[i].coords() - points[j].coords()).norm());
    }
  }
  return best;
}

namespace {

// Points stored column-wise for fast rejection scans.
class PackingBuilder {
 public:
  PackingBuilder(int d, double epsilon) : d_(d), threshold_sq_(sq(epsilon - kPackingSlack)) {}

  bool try_add(const Point& p) {
    for (std::size_t j = 0; j < count_; ++j) {
      const double* q = &data_[j * static_cast<std::size_t>(d_)];
      double s = 0.0;
      for (int k = 0; k < d_; ++k) {
        const double diff = p[k] - q[k];
        s += diff * diff;
      }
      if (s < threshold_sq_) return false;
    }
    for (int k = 0; k < d_; ++k) data_.push_back(p[k]);
    ++count_;
    return true;
  }

  std::vector<Direction> points() const {
    std::vector<Direction> out;
    out.reserve(count_);
    for (std::size_t j = 0; j < count_; ++j) {
      Point p(d_);
      for (int k = 0; k < d_; ++k) p[k] = data_[j * static_cast<std::size_t>(d_) + static_cast<std::size_t>(k)];
      out.push_back(Direction::normalized(p));
    }
    return out;
  }

 private:
  static double sq(double x) { return x < 0.0 ? 0.0 : x * x; }
  int d_;
  double threshold_sq_;
  std::size_t count_ = 0;
  std::vector<double> data_;
};

}  // namespace

PackingSet maximal_packing(Rng& rng, int d, double epsilon, std::size_t saturation) {
  if (d < 2) throw ParameterError("maximal_packing needs d >= 2");
  if (!(epsilon > 0.0 && epsilon <= 2.0)) {
    throw ParameterError("packing radius must lie in (0, 2]");
  }
  if (saturation < 1) throw ParameterError("saturation count must be >= 1");

  PackingBuilder builder(d, epsilon);
  if (d == 2) {
    std::uniform_real_distribution<double> start_dist(0.0, 2.0 * std::numbers::pi);
    const double start = start_dist(rng);
    const double step = 2.0 * std::asin(std::min(1.0, epsilon / 2.0));
    const auto count =
        static_cast<std::size_t>(std::floor(2.0 * std::numbers::pi / step + 1e-9));
    for (std::size_t k = 0; k < count; ++k) {
      const double t = start + step * static_cast<double>(k);
      Point p(2);
      p << std::cos(t), std::sin(t);
      builder.try_add(p);
    }
  }

  std::size_t rejections = 0;
  while (rejections < saturation) {
    const Direction u = uniform_direction(rng, d);
    if (builder.try_add(u.coords())) {
      rejections = 0;
    } else {
      ++rejections;
    }
  }

  PackingSet out;
  out.dim = d;
  out.epsilon = epsilon;
  out.points = builder.points();
  out.saturation = saturation;
  out.saturated = true;
  return out;
}

PackingSet maximal_packing(Rng& rng, int d, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 2.0)) {
    throw ParameterError("packing radius must lie in (0, 2]");
  }
  return maximal_packing(rng, d, epsilon, default_saturation(d, epsilon));
}

McEstimate cap_measure_mc(Rng& rng, int d, double delta, std::size_t n_mc) {
  if (!(delta > 0.0 && delta <= 2.0)) throw ParameterError("cap radius must lie in (0, 2]");
  if (n_mc < 100) throw ParameterError("cap_measure_mc needs n_mc >= 100");
  // |u - e1|^2 = 2 - 2 u_1 <= delta^2  <=>  u_1 >= 1 - delta^2 / 2.
  const double threshold = 1.0 - delta * delta / 2.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    if (uniform_direction(rng, d)[0] >= threshold) ++hits;
  }
  const double n = static_cast<double>(n_mc);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / (n - 1.0))};
}

CapCount count_packing_in_cap(const PackingSet& pack, const Direction& v, double delta) {
  if (v.dim() != pack.dim) throw MalformedInput("count_packing_in_cap: dimension mismatch");
  CapCount out;
  out.outside_bound_range = !(pack.epsilon <= delta / 2.0 && delta <= 0.8);
  for (const Direction& u : pack.points) {
    if ((u.coords() - v.coords()).norm() <= delta) ++out.count;
  }
  return out;
}

}  // namespace supportfit
