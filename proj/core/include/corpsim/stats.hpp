#pragma once

#include <cstddef>
#include <span>
#include <utility>

namespace corpsim {

/// Product-moment correlation. Throws DegenerateVectorError for n < 2 or a
/// zero-variance coordinate.
double pearson_r(std::span<const std::pair<double, double>> pairs);
double pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Least-squares slope sum(dx*dy)/sum(dx^2). Throws for constant xs.
double ols_slope(std::span<const double> xs, std::span<const double> ys);

/// Change in percentage points from the first to the last comparison.
constexpr double stability_delta(double first, double last) noexcept { return last - first; }

struct TTestResult {
  double t = 0.0;
  std::size_t df = 0;
  double p_two_sided = 1.0;
  double mu0 = 0.0;
};

/// Student's one-sample t-test with the sample standard deviation.
/// Throws DegenerateVectorError for n < 2 or zero spread.
TTestResult one_sample_t_test(std::span<const double> values, double mu0);

/// max - min. Throws InsufficientDataError on empty input.
double max_min_range(std::span<const double> values);

double mean(std::span<const double> values);

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace corpsim
