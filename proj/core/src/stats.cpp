#include "workbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "math_detail.hpp"
#include "workbench/error.hpp"
#include "workbench/laws.hpp"

namespace workbench::stats {
namespace {

using detail::require;

double pairwise_sum_range(const double* data, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_range(data, half) + pairwise_sum_range(data + half, n - half);
}

// Series representation of P(a, x), valid for x < a + 1.
double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - detail::log_gamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x) (modified Lentz), x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - detail::log_gamma(a)) * h;
}

double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

// Inverts a continuous increasing cdf on [0, inf) by bracketing and bisection.
template <typename Cdf>
double invert_increasing(Cdf&& cdf, double probability, double initial_upper) {
  double lo = 0.0;
  double hi = initial_upper;
  while (cdf(hi) < probability) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < probability ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double relative_frequency(std::uint64_t occurrences, std::uint64_t trials) {
  require(trials >= 1, "relative_frequency: trials must be >= 1");
  require(occurrences <= trials, "relative_frequency: occurrences exceed trials");
  return static_cast<double>(occurrences) / static_cast<double>(trials);
}

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_range(values.data(), values.size());
}

double mean(std::span<const double> values) {
  require(!values.empty(), "mean: empty sample");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  require(values.size() >= 2, "sample_variance: needs at least two samples");
  const double m = mean(values);
  std::vector<double> squares(values.size());
  std::transform(values.begin(), values.end(), squares.begin(),
                 [m](double v) { return (v - m) * (v - m); });
  return pairwise_sum(squares) / static_cast<double>(values.size() - 1);
}

EstimateWithCI mean_ci(std::span<const double> samples, double level) {
  require(samples.size() >= 2, "mean_ci: needs at least two samples");
  require(level > 0.0 && level < 1.0, "mean_ci: level must lie in (0, 1)");
  const double m = mean(samples);
  const double var = sample_variance(samples);
  require(std::isfinite(var), "mean_ci: sample variance is not finite");
  const double z = laws::standard_normal_quantile(0.5 * (1.0 + level));
  return {m, z * std::sqrt(var / static_cast<double>(samples.size())), level, samples.size()};
}

EstimateWithCI batch_ci(std::span<const double> batch_values, double level) {
  require(batch_values.size() >= 2, "batch_ci: needs at least two batches");
  require(level > 0.0 && level < 1.0, "batch_ci: level must lie in (0, 1)");
  const double m = mean(batch_values);
  const double var = sample_variance(batch_values);
  const double t = student_t_quantile(0.5 * (1.0 + level),
                                      static_cast<double>(batch_values.size() - 1));
  return {m, t * std::sqrt(var / static_cast<double>(batch_values.size())), level,
          batch_values.size()};
}

EstimateWithCI batch_means_ci(std::span<const double> series, double level, std::size_t batches) {
  require(batches >= 2, "batch_means_ci: needs at least two batches");
  require(series.size() >= batches, "batch_means_ci: fewer observations than batches");
  const std::size_t per_batch = series.size() / batches;
  const std::size_t offset = series.size() - per_batch * batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b)
    means[b] = mean(series.subspan(offset + b * per_batch, per_batch));
  return batch_ci(means, level);
}

double regularized_gamma_p(double a, double x) {
  require(a > 0.0, "regularized_gamma_p: a must be > 0");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, "regularized_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(detail::log_gamma(a + b) - detail::log_gamma(a) -
                                detail::log_gamma(b) + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double chi_square_cdf(double x, double dof) {
  require(dof > 0.0, "chi_square_cdf: dof must be > 0");
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double probability, double dof) {
  require(probability > 0.0 && probability < 1.0, "chi_square_quantile: probability in (0, 1)");
  require(dof > 0.0, "chi_square_quantile: dof must be > 0");
  return invert_increasing([dof](double x) { return chi_square_cdf(x, dof); }, probability,
                           std::max(1.0, 2.0 * dof));
}

double student_t_cdf(double t, double dof) {
  require(dof > 0.0, "student_t_cdf: dof must be > 0");
  const double tail = 0.5 * regularized_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double probability, double dof) {
  require(probability > 0.0 && probability < 1.0, "student_t_quantile: probability in (0, 1)");
  if (probability == 0.5) return 0.0;
  if (probability < 0.5) return -student_t_quantile(1.0 - probability, dof);
  return invert_increasing([dof](double t) { return student_t_cdf(t, dof); }, probability, 4.0);
}

double ks_asymptotic_constant(double alpha) {
  if (alpha == 0.05) return 1.3581;
  if (alpha == 0.01) return 1.6276;
  if (alpha == 0.001) return 1.9495;
  throw DomainError("ks: significance must be one of 0.05, 0.01, 0.001");
}

KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf,
                      double alpha) {
  require(samples.size() >= 10, "ks_statistic: needs at least 10 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  KsResult result;
  result.statistic = d;
  result.n = sorted.size();
  result.alpha = alpha;
  result.critical_value = ks_asymptotic_constant(alpha) / std::sqrt(n);
  result.passed = d <= result.critical_value;
  return result;
}

ChiSquareResult chi_square_statistic(std::span<const double> observed,
                                     std::span<const double> expected_probability, double n,
                                     double alpha, std::size_t fitted_parameters) {
  require(observed.size() == expected_probability.size(),
          "chi_square: observed and expected sizes differ");
  require(n > 0.0, "chi_square: n must be > 0");
  require(alpha > 0.0 && alpha < 1.0, "chi_square: alpha must lie in (0, 1)");
  std::vector<double> obs(observed.begin(), observed.end());
  std::vector<double> exp_counts(expected_probability.size());
  double obs_total = 0.0;
  double prob_total = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    require(obs[i] >= 0.0, "chi_square: negative count");
    require(expected_probability[i] >= 0.0, "chi_square: negative probability");
    obs_total += obs[i];
    prob_total += expected_probability[i];
    exp_counts[i] = n * expected_probability[i];
  }
  require(obs_total <= n * (1.0 + 1e-12), "chi_square: counts exceed n");
  require(prob_total <= 1.0 + 1e-9, "chi_square: probabilities exceed 1");
  const double residual_prob = std::max(0.0, 1.0 - prob_total);
  const double residual_obs = std::max(0.0, n - obs_total);
  if (residual_prob > 1e-12 || residual_obs > 0.0) {
    obs.push_back(residual_obs);
    exp_counts.push_back(n * residual_prob);
  }

  ChiSquareResult result;
  result.alpha = alpha;
  double acc_obs = 0.0;
  double acc_exp = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    acc_obs += obs[i];
    acc_exp += exp_counts[i];
    if (acc_exp >= 5.0) {
      result.pooled_observed.push_back(acc_obs);
      result.pooled_expected.push_back(acc_exp);
      acc_obs = 0.0;
      acc_exp = 0.0;
    }
  }
  if (acc_exp > 0.0 || acc_obs > 0.0) {
    if (result.pooled_expected.empty()) {
      result.pooled_observed.push_back(acc_obs);
      result.pooled_expected.push_back(acc_exp);
    } else {
      result.pooled_observed.back() += acc_obs;
      result.pooled_expected.back() += acc_exp;
    }
  }
  require(result.pooled_expected.size() >= 2 + fitted_parameters,
          "chi_square: too few bins after pooling");
  double stat = 0.0;
  for (std::size_t i = 0; i < result.pooled_expected.size(); ++i) {
    const double e = result.pooled_expected[i];
    if (e <= 0.0) {
      // Only reachable for an all-zero trailing group merged into nothing.
      if (result.pooled_observed[i] > 0.0) stat = std::numeric_limits<double>::infinity();
      continue;
    }
    const double diff = result.pooled_observed[i] - e;
    stat += diff * diff / e;
  }
  result.statistic = stat;
  result.dof = result.pooled_expected.size() - 1 - fitted_parameters;
  result.critical_value = chi_square_quantile(1.0 - alpha, static_cast<double>(result.dof));
  result.passed = stat <= result.critical_value;
  return result;
}

std::vector<double> histogram(std::span<const double> samples, std::size_t max_value) {
  std::vector<double> counts(max_value + 1, 0.0);
  for (double v : samples) {
    require(v >= 0.0 && v == std::floor(v), "histogram: values must be non-negative integers");
    if (v <= static_cast<double>(max_value)) counts[static_cast<std::size_t>(v)] += 1.0;
  }
  return counts;
}

}  // namespace workbench::stats
