#include "supportfit/estimators.hpp"

#include <cmath>

#include "supportfit/errors.hpp"

namespace supportfit {

void MeasurementSet::validate() const {
  if (values.empty() || directions.size() != values.size()) {
    throw MalformedInput("measurement set needs equal-length, nonempty lists");
  }
  const int d = directions.front().dim();
  for (const Direction& u : directions) {
    if (u.dim() != d) throw MalformedInput("measurement directions have mixed dimensions");
  }
  for (double y : values) {
    if (!std::isfinite(y)) throw MalformedInput("measurement values must be finite");
  }
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be nonnegative");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
}

double ls_objective(const MeasurementSet& data, const Polytope& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = data.values[i] - support_polytope(p, data.directions[i]);
    total += r * r;
  }
  return total;
}

FitResult fit_ls_net(const MeasurementSet& data, std::span<const Polytope> family) {
  data.validate();
  if (family.empty()) throw ParameterError("net estimator needs a nonempty family");
  std::size_t best = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (family[k].dim() != data.dim()) {
      throw MalformedInput("family member " + std::to_string(k) + " has the wrong dimension");
    }
    const double obj = ls_objective(data, family[k]);
    if (obj < best_obj) {
      best_obj = obj;
      best = k;
    }
  }
  FitResult out{family[best], {}, best_obj, {}};
  out.fitted = sample_support(Body(out.polytope), data.directions);
  out.diagnostics.estimator = "net";
  out.diagnostics.best_restart = static_cast<int>(best);
  return out;
}

std::size_t choose_m(std::size_t n, int d, double sigma, double gamma, DesignSetting setting) {
  if (n < 1) throw ParameterError("choose_m needs n >= 1");
  if (d < 2) throw ParameterError("choose_m needs d >= 2");
  const double e = static_cast<double>(d - 1) / static_cast<double>(d + 3);
  double m = std::pow(static_cast<double>(n), e);
  if (setting == DesignSetting::Fixed) {
    if (!(gamma > 0.0)) throw ParameterError("choose_m needs gamma > 0");
    if (!(sigma > 0.0)) return n;
    m *= std::pow(sigma, -2.0 * e) * std::pow(gamma, 2.0 * e);
  }
  const double r = std::round(m);
  if (!(r >= 1.0)) return 1;
  return r >= static_cast<double>(n) ? n : static_cast<std::size_t>(r);
}

}  // namespace supportfit
