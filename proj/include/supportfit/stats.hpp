#pragma once

#include <span>
#include <string>
#include <vector>

namespace supportfit {

/// Pairwise (cascade) summation; the result depends only on element order.
double pairwise_sum(std::span<const double> values);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error (n - 1 denominator). Needs at least one value;
/// std_error is 0 for a single value.
MeanStderr mean_stderr(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs >= 2 points with
/// distinct x; standard errors need >= 3.
LineFit ols(std::span<const double> x, std::span<const double> y);

/// Log-log slope fit compared against a target exponent.
struct RateFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double target_exponent = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t points_used = 0;
  std::vector<std::string> warnings;
};

/// Fits log(y) against log(x). Points with y <= 0 are dropped with a warning;
/// fewer than 3 surviving points is a ParameterError.
RateFit fit_log_log(std::span<const double> x, std::span<const double> y,
                    double target_exponent, double tolerance);

}  // namespace supportfit
