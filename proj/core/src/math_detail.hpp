#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace workbench::detail {

// lgamma_r avoids the write to the global `signgam` that makes std::lgamma
// unsafe to call from several replication threads.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Saddle-point evaluation of the binomial and Poisson pmfs (C. Loader, "Fast
// and accurate computation of binomial probabilities", 2000). The log-gamma
// differences are replaced by the Stirling remainder and the deviance bd0,
// which keeps the relative error near machine precision for any n.

/// stirlerr(n) = log(n!) - log(sqrt(2 pi n) (n/e)^n) for integer n >= 1.
inline double stirling_error(std::int64_t n) {
  if (n <= 15) {
    long double fact = 1.0L;
    for (std::int64_t i = 2; i <= n; ++i) fact *= static_cast<long double>(i);
    const long double nl = static_cast<long double>(n);
    return static_cast<double>(std::log(fact) - (nl + 0.5L) * std::log(nl) + nl -
                               0.5L * std::log(2.0L * std::numbers::pi_v<long double>));
  }
  constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680,
                   s4 = 1.0 / 1188;
  const double x = static_cast<double>(n);
  const double xx = x * x;
  if (n > 500) return (s0 - s1 / xx) / x;
  if (n > 80) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

/// Deviance term x log(x / m) + m - x, by series when x is close to m.
inline double bd0(double x, double m) {
  if (std::abs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

/// P{Binomial(n, p) = k} with q = 1 - p supplied separately.
inline double binomial_pmf_saddle(std::int64_t n, double p, double q, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (q == 0.0) return k == n ? 1.0 : 0.0;
  const double nd = static_cast<double>(n);
  if (k == 0) {
    if (n == 0) return 1.0;
    return std::exp(p < 0.1 ? -bd0(nd, nd * q) - nd * p : nd * std::log(q));
  }
  if (k == n) return std::exp(q < 0.1 ? -bd0(nd, nd * p) - nd * q : nd * std::log(p));
  const double kd = static_cast<double>(k);
  const double lc = stirling_error(n) - stirling_error(k) - stirling_error(n - k) -
                    bd0(kd, nd * p) - bd0(nd - kd, nd * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(kd) + std::log1p(-kd / nd);
  return std::exp(lc - 0.5 * lf);
}

/// P{Poisson(lambda) = k}.
inline double poisson_pmf_saddle(double lambda, std::int64_t k) {
  if (k < 0) return 0.0;
  if (k == 0) return std::exp(-lambda);
  const double kd = static_cast<double>(k);
  return std::exp(-stirling_error(k) - bd0(kd, lambda)) / std::sqrt(2.0 * std::numbers::pi * kd);
}

}  // namespace workbench::detail
