#include "supportfit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "supportfit/errors.hpp"

namespace supportfit {

Direction::Direction(Point coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) {
    throw MalformedInput("direction needs at least 2 coordinates");
  }
  const double norm = coords_.norm();
  if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
    throw MalformedInput("direction is not a unit vector (norm " + std::to_string(norm) +
                         ")");
  }
}

Direction Direction::normalized(const Point& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw MalformedInput("cannot normalize a zero or non-finite vector");
  }
  return Direction(v / norm);
}

double angle_between(const Direction& u, const Direction& v) {
  const double c = u.dot(v);
  const double s = (u.coords() - c * v.coords()).norm();
  return std::atan2(s, c);
}

namespace {

Eigen::MatrixXd dedup_columns(const Eigen::MatrixXd& cols) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    bool duplicate = false;
    for (Eigen::Index k : keep) {
      if ((cols.col(j) - cols.col(k)).norm() <= kDedupTolerance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) keep.push_back(j);
  }
  Eigen::MatrixXd out(cols.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = cols.col(keep[i]);
  }
  return out;
}

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw MalformedInput(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Polytope::Polytope(std::span<const Point> points) {
  if (points.empty()) throw MalformedInput("polytope needs at least one point");
  const Eigen::Index d = points.front().size();
  if (d < 1) throw MalformedInput("polytope points must have at least one coordinate");
  Eigen::MatrixXd cols(d, static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != d) throw MalformedInput("polytope points have ragged dimensions");
    cols.col(static_cast<Eigen::Index>(j)) = points[j];
  }
  if (!cols.allFinite()) throw MalformedInput("polytope has non-finite coordinates");
  vertices_ = dedup_columns(cols);
}

Polytope::Polytope(const Eigen::MatrixXd& columns) {
  if (columns.cols() == 0 || columns.rows() == 0) {
    throw MalformedInput("polytope needs at least one point");
  }
  if (!columns.allFinite()) throw MalformedInput("polytope has non-finite coordinates");
  vertices_ = dedup_columns(columns);
}

double Polytope::max_vertex_norm() const { return vertices_.colwise().norm().maxCoeff(); }

void Polytope::require_within(double gamma) const {
  const double r = max_vertex_norm();
  if (r > gamma + kRadiusSlack) {
    throw ValidationError("polytope vertex norm " + std::to_string(r) +
                          " exceeds radius bound " + std::to_string(gamma));
  }
}

double cap_angle(double eta) { return std::atan2(std::sqrt(eta * (2.0 - eta)), 1.0 - eta); }

CapBody::CapBody(int dim, double gamma, std::vector<Cap> caps)
    : dim_(dim), gamma_(gamma), caps_(std::move(caps)) {
  if (dim_ < 2) throw MalformedInput("cap body dimension must be >= 2");
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
    throw ParameterError("cap body radius must be positive");
  }
  angles_.reserve(caps_.size());
  for (const Cap& c : caps_) {
    require_same_dim(c.axis.dim(), dim_, "cap axis");
    if (!(c.eta > 0.0 && c.eta <= 0.125)) {
      throw ParameterError("cap eta must lie in (0, 1/8], got " + std::to_string(c.eta));
    }
    angles_.push_back(supportfit::cap_angle(c.eta));
  }
  for (std::size_t i = 0; i < caps_.size(); ++i) {
    if (!caps_[i].truncated) continue;
    for (std::size_t j = i + 1; j < caps_.size(); ++j) {
      if (!caps_[j].truncated) continue;
      const double sep = angle_between(caps_[i].axis, caps_[j].axis);
      if (sep + kCapAngleSlack < angles_[i] + angles_[j]) {
        throw MalformedInput("truncated caps " + std::to_string(i) + " and " +
                             std::to_string(j) + " overlap: invalid Assouad family");
      }
    }
  }
}

int body_dim(const Body& body) {
  return std::visit([](const auto& b) { return b.dim(); }, body);
}

double body_radius(const Body& body) {
  if (const auto* p = std::get_if<Polytope>(&body)) return p->max_vertex_norm();
  return std::get<CapBody>(body).gamma();
}

double support_polytope(const Polytope& p, const Direction& u) {
  require_same_dim(p.dim(), u.dim(), "support_polytope");
  return (p.vertices().transpose() * u.coords()).maxCoeff();
}

double support_cap_body(const CapBody& b, const Direction& u) {
  require_same_dim(b.dim(), u.dim(), "support_cap_body");
  double h = b.gamma();
  for (std::size_t j = 0; j < b.caps().size(); ++j) {
    const Cap& cap = b.caps()[j];
    if (!cap.truncated) continue;
    const double alpha = b.cap_angle(j);
    const double theta = angle_between(u, cap.axis);
    if (theta <= alpha + kCapAngleSlack) {
      h = std::min(h, b.gamma() * std::cos(alpha - theta));
    }
  }
  return h;
}

double support(const Body& body, const Direction& u) {
  if (const auto* p = std::get_if<Polytope>(&body)) return support_polytope(*p, u);
  return support_cap_body(std::get<CapBody>(body), u);
}

double cap_deficit(const CapBody& b, const Direction& u) {
  return b.gamma() - support_cap_body(b, u);
}

void SupportSamples::validate() const {
  if (directions.empty() || directions.size() != values.size()) {
    throw MalformedInput("support samples need equal-length, nonempty lists");
  }
}

SupportSamples sample_support(const Body& body, std::span<const Direction> directions) {
  SupportSamples out;
  out.directions.assign(directions.begin(), directions.end());
  out.values.reserve(directions.size());
  for (const Direction& u : directions) out.values.push_back(support(body, u));
  return out;
}

double loss_f(const SupportSamples& a, const SupportSamples& b) {
  a.validate();
  b.validate();
  if (a.size() != b.size()) throw MalformedInput("loss_f: sample lengths differ");
  std::vector<double> sq(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& ua = a.directions[i].coords();
    const auto& ub = b.directions[i].coords();
    if (ua.size() != ub.size() || (ua - ub).cwiseAbs().maxCoeff() > kUnitTolerance) {
      throw MalformedInput("loss_f: direction lists differ at index " + std::to_string(i));
    }
    const double diff = a.values[i] - b.values[i];
    sq[i] = diff * diff;
  }
  return pairwise_sum(sq) / static_cast<double>(sq.size());
}

namespace {

std::vector<Direction> draw(const DirectionSource& nu, std::size_t n) {
  std::vector<Direction> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(nu());
  return out;
}

}  // namespace

McEstimate loss_r_on_sample(const Body& k1, const Body& k2,
                            std::span<const Direction> sample) {
  require_same_dim(body_dim(k1), body_dim(k2), "loss_r");
  if (sample.size() < 2) throw ParameterError("loss_r needs at least 2 directions");
  std::vector<double> sq(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double diff = support(k1, sample[i]) - support(k2, sample[i]);
    sq[i] = diff * diff;
  }
  const MeanStderr ms = mean_stderr(sq);
  return {ms.mean, ms.std_error};
}

McEstimate loss_r_mc(const Body& k1, const Body& k2, const DirectionSource& nu,
                     std::size_t n_mc) {
  if (n_mc < 2) throw ParameterError("loss_r needs n_mc >= 2");
  const auto sample = draw(nu, n_mc);
  return loss_r_on_sample(k1, k2, sample);
}

double loss_new_on_sample(const Body& k1, const Body& k2, double sigma,
                          std::span<const Direction> sample) {
  if (!(sigma > 0.0)) throw ParameterError("loss_new needs sigma > 0");
  require_same_dim(body_dim(k1), body_dim(k2), "loss_new");
  if (sample.empty()) throw ParameterError("loss_new needs at least one direction");
  const double scale = 16.0 * sigma * sigma;
  // log-mean-exp of -diff^2 / scale, shifted by the largest exponent.
  std::vector<double> expo(sample.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double diff = support(k1, sample[i]) - support(k2, sample[i]);
    expo[i] = -diff * diff / scale;
    top = std::max(top, expo[i]);
  }
  std::vector<double> terms(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) terms[i] = std::exp(expo[i] - top);
  const double log_mean =
      top + std::log(pairwise_sum(terms) / static_cast<double>(sample.size()));
  return std::max(0.0, -scale * log_mean);
}

double loss_new(const Body& k1, const Body& k2, double sigma, const DirectionSource& nu,
                std::size_t n_mc) {
  if (!(sigma > 0.0)) throw ParameterError("loss_new needs sigma > 0");
  if (n_mc < 1) throw ParameterError("loss_new needs n_mc >= 1");
  const auto sample = draw(nu, n_mc);
  return loss_new_on_sample(k1, k2, sigma, sample);
}

double loss_comparison_factor(double gamma, double sigma) {
  const double a = gamma * gamma / (4.0 * sigma * sigma);
  return a / -std::expm1(-a);
}

double hausdorff_polytopes(const Polytope& p, const Polytope& q) {
  require_same_dim(p.dim(), q.dim(), "hausdorff_polytopes");
  auto one_sided = [](const Polytope& from, const Polytope& to) {
    double worst = 0.0;
    for (std::size_t j = 0; j < from.size(); ++j) {
      worst = std::max(worst, project_point_to_polytope(from.vertex(j), to).distance);
    }
    return worst;
  };
  return std::max(one_sided(p, q), one_sided(q, p));
}

}  // namespace supportfit
