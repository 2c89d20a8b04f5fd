#pragma once

// Independent reference computations for the unit and acceptance suites.
// Nothing here calls into workbench::; each oracle takes a different route
// (enumeration, quadrature, closed forms, dense linear algebra) from the code
// it checks.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t panels = 20000) {
  if (panels % 2 == 1) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return sum * h / 3.0;
}

/// Binomial pmf by the multiplicative recurrence from k = 0 (no log-gamma).
inline std::vector<double> binomial_pmf_recurrence(std::int64_t n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  pmf[0] = std::pow(1.0 - p, static_cast<double>(n));
  for (std::int64_t k = 0; k < n; ++k)
    pmf[static_cast<std::size_t>(k) + 1] = pmf[static_cast<std::size_t>(k)] *
                                           static_cast<double>(n - k) /
                                           static_cast<double>(k + 1) * p / (1.0 - p);
  return pmf;
}

/// P{Binomial(n, p) = k} by enumerating all 2^n outcome sequences.
inline double binomial_pmf_enumerated(int n, double p, int k) {
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int successes = 0;
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      const bool hit = (mask >> i) & 1u;
      successes += hit;
      prob *= hit ? p : 1.0 - p;
    }
    if (successes == k) total += prob;
  }
  return total;
}

/// Poisson pmf e^{-lambda} lambda^k / k! by running product.
inline std::vector<double> poisson_pmf_product(double lambda, std::size_t k_max) {
  std::vector<double> pmf(k_max + 1);
  pmf[0] = std::exp(-lambda);
  for (std::size_t k = 1; k <= k_max; ++k) pmf[k] = pmf[k - 1] * lambda / static_cast<double>(k);
  return pmf;
}

/// Dense Gaussian elimination with partial pivoting: solves A x = b.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Stationary law of a row-stochastic matrix: solves pi (P - I) = 0 with one
/// equation replaced by sum(pi) = 1.
inline std::vector<double> stationary_linear_solve(const std::vector<std::vector<double>>& p) {
  const std::size_t n = p.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = p[j][i] - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  b[n - 1] = 1.0;
  return solve_dense(a, b);
}

/// exp(Q t) for the two-state generator [[-a, a], [b, -b]].
inline std::array<std::array<double, 2>, 2> two_state_exponential(double a, double b, double t) {
  const double s = a + b;
  const double e = std::exp(-s * t);
  return {{{(b + a * e) / s, (a - a * e) / s}, {(b - b * e) / s, (a + b * e) / s}}};
}

/// Black-Scholes price of a European call (reference only; not part of the
/// library, which prices by tree and Monte Carlo).
inline double black_scholes_call(double s0, double k, double r, double sigma, double t) {
  const double sd = sigma * std::sqrt(t);
  const double d1 = (std::log(s0 / k) + (r + 0.5 * sigma * sigma) * t) / sd;
  const double d2 = d1 - sd;
  auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  return s0 * phi(d1) - k * std::exp(-r * t) * phi(d2);
}

}  // namespace oracle
