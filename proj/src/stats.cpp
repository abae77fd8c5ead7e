#include "supportfit/stats.hpp"

#include <cmath>

#include "supportfit/errors.hpp"

namespace supportfit {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanStderr mean_stderr(std::span<const double> values) {
  if (values.empty()) throw ParameterError("mean_stderr of an empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  if (values.size() == 1) return {mean, 0.0};
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    dev[i] = d * d;
  }
  const double var = pairwise_sum(dev) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

LineFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MalformedInput("ols: x and y lengths differ");
  if (x.size() < 2) throw ParameterError("ols needs at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n;
  const double my = pairwise_sum(y) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("ols needs distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() >= 3) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    const double s2 = rss / (n - 2.0);
    fit.slope_stderr = std::sqrt(s2 / sxx);
    fit.intercept_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return fit;
}

RateFit fit_log_log(std::span<const double> x, std::span<const double> y,
                    double target_exponent, double tolerance) {
  if (x.size() != y.size()) throw MalformedInput("fit_log_log: x and y lengths differ");
  RateFit out;
  out.target_exponent = target_exponent;
  out.tolerance = tolerance;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) {
      out.warnings.push_back("dropped point " + std::to_string(i) + " with nonpositive value");
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 3) throw ParameterError("rate fit needs at least 3 positive points");
  const LineFit line = ols(lx, ly);
  out.slope = line.slope;
  out.slope_stderr = line.slope_stderr;
  out.intercept = line.intercept;
  out.points_used = lx.size();
  out.pass = std::abs(out.slope - target_exponent) <= tolerance;
  return out;
}

}  // namespace supportfit
