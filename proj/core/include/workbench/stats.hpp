#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace workbench::stats {

/// A point estimate with a symmetric confidence interval.
struct EstimateWithCI {
  double mean = 0.0;
  double half_width = 0.0;
  double level = 0.95;
  std::size_t n = 0;

  double low() const { return mean - half_width; }
  double high() const { return mean + half_width; }
  bool covers(double value) const { return value >= low() && value <= high(); }
};

double relative_frequency(std::uint64_t occurrences, std::uint64_t trials);

/// Pairwise (cascade) summation; the result depends only on the order of the
/// input, never on how work was split across threads.
double pairwise_sum(std::span<const double> values);
double mean(std::span<const double> values);
/// Unbiased sample variance (denominator n-1).
double sample_variance(std::span<const double> values);

/// CLT interval mean +- z * s / sqrt(n), z the normal quantile for `level`.
EstimateWithCI mean_ci(std::span<const double> samples, double level);

/// Interval from already-formed batch means using the Student-t quantile with
/// (batches - 1) degrees of freedom.
EstimateWithCI batch_ci(std::span<const double> batch_values, double level);

/// Splits a series into `batches` contiguous equal batches (the remainder is
/// dropped from the front) and applies batch_ci to their means.
EstimateWithCI batch_means_ci(std::span<const double> series, double level,
                              std::size_t batches = 20);

// Special functions backing the critical values.

double regularized_gamma_p(double a, double x);
double regularized_beta(double a, double b, double x);
double chi_square_cdf(double x, double dof);
double chi_square_quantile(double probability, double dof);
double student_t_cdf(double t, double dof);
double student_t_quantile(double probability, double dof);

struct KsResult {
  double statistic = 0.0;
  std::size_t n = 0;
  double alpha = 0.001;
  double critical_value = 0.0;
  bool passed = false;
};

/// Asymptotic Kolmogorov constant c(alpha) with P{sqrt(n) D_n > c} = alpha.
/// Tabulated for alpha in {0.05, 0.01, 0.001}; other levels throw.
double ks_asymptotic_constant(double alpha);

/// One-sample Kolmogorov-Smirnov test against a continuous cdf. Passes when
/// D_n <= c(alpha) / sqrt(n). Requires n >= 10.
KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf,
                      double alpha = 0.001);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double alpha = 0.001;
  double critical_value = 0.0;
  bool passed = false;
  /// Bins after pooling; observed counts and expected counts n * p.
  std::vector<double> pooled_observed;
  std::vector<double> pooled_expected;
};

/// Pearson chi-square of observed counts against bin probabilities.
///
/// If the probabilities sum to less than one (a truncated support) or the
/// counts sum to less than n, a residual bin is appended. Adjacent bins are
/// then pooled left to right until each has n * p >= 5, with an undersized
/// final group merged into its neighbour. Degrees of freedom are
/// (pooled bins - 1 - fitted_parameters).
ChiSquareResult chi_square_statistic(std::span<const double> observed,
                                     std::span<const double> expected_probability, double n,
                                     double alpha = 0.001, std::size_t fitted_parameters = 0);

/// Convenience: counts of the non-negative integer values in `samples`,
/// indexed 0..max_value; larger values are dropped (they land in the
/// residual bin of chi_square_statistic).
std::vector<double> histogram(std::span<const double> samples, std::size_t max_value);

}  // namespace workbench::stats
