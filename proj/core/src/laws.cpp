#include "workbench/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "math_detail.hpp"
#include "workbench/error.hpp"

namespace workbench::laws {
namespace {

using detail::require;

constexpr double kSeriesTail = 1e-14;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

double binomial_pmf(std::int64_t n, double p, std::int64_t k) {
  return detail::binomial_pmf_saddle(n, p, 1.0 - p, k);
}

double poisson_pmf(double lambda, std::int64_t k) { return detail::poisson_pmf_saddle(lambda, k); }

// Sum of pmf over j > k for k past the mode, where the terms decrease.
template <typename Pmf>
double upper_series(std::int64_t k, Pmf&& term) {
  double sum = 0.0;
  for (std::int64_t j = k + 1;; ++j) {
    const double t = term(j);
    sum += t;
    if (t == 0.0 || t <= 1e-17 * sum) break;
  }
  return sum;
}

template <typename Pmf>
double lower_sum(std::int64_t k, Pmf&& term) {
  double sum = 0.0;
  for (std::int64_t j = 0; j <= k; ++j) sum += term(j);
  return sum;
}

}  // namespace

void validate(const DiscreteLaw& law) {
  std::visit(
      Overloaded{
          [](const Binomial& b) {
            require(b.n >= 0, "binomial: n must be >= 0");
            require(is_probability(b.p), "binomial: p must lie in [0, 1]");
          },
          [](const Geometric& g) {
            require(std::isfinite(g.p) && g.p > 0.0 && g.p <= 1.0,
                    "geometric: p must lie in (0, 1]");
          },
          [](const Poisson& p) {
            require(std::isfinite(p.lambda) && p.lambda > 0.0, "poisson: lambda must be > 0");
          },
          [](const FiniteUniform& u) { require(u.size >= 1, "uniform: size must be >= 1"); },
          [](const Explicit& e) {
            require(!e.pmf.empty(), "explicit: pmf table is empty");
            double sum = 0.0;
            for (double v : e.pmf) {
              require(std::isfinite(v) && v >= 0.0, "explicit: pmf entries must be >= 0");
              sum += v;
            }
            require(std::abs(sum - 1.0) <= 1e-12, "explicit: pmf must sum to 1 within 1e-12");
          },
      },
      law);
}

void validate(const ContinuousLaw& law) {
  std::visit(Overloaded{
                 [](const Exponential& e) {
                   require(std::isfinite(e.lambda) && e.lambda > 0.0,
                           "exponential: lambda must be > 0");
                 },
                 [](const Normal& n) {
                   require(std::isfinite(n.mu), "normal: mu must be finite");
                   require(std::isfinite(n.sigma2) && n.sigma2 > 0.0,
                           "normal: sigma2 must be > 0");
                 },
                 [](const Uniform& u) {
                   require(std::isfinite(u.a) && std::isfinite(u.b) && u.a < u.b,
                           "uniform: requires a < b");
                 },
             },
             law);
}

double union_probability(double p_a, double p_b, double p_ab) {
  require(is_probability(p_a) && is_probability(p_b) && is_probability(p_ab),
          "union_probability: inputs must be probabilities");
  require(p_ab <= std::min(p_a, p_b), "union_probability: P(A n B) exceeds min(P(A), P(B))");
  const double result = p_a + p_b - p_ab;
  require(result <= 1.0 + 1e-15, "union_probability: P(A u B) exceeds 1");
  return std::min(result, 1.0);
}

double conditional_probability(double p_ab, double p_b) {
  require(is_probability(p_ab) && is_probability(p_b),
          "conditional_probability: inputs must be probabilities");
  if (p_b == 0.0) throw DomainError("conditional_probability: conditioning on a null event");
  require(p_ab <= p_b, "conditional_probability: P(A n B) exceeds P(B)");
  return p_ab / p_b;
}

double pmf(const DiscreteLaw& law, std::int64_t k) {
  validate(law);
  if (k < 0) return 0.0;
  return std::visit(
      Overloaded{
          [k](const Binomial& b) { return binomial_pmf(b.n, b.p, k); },
          [k](const Geometric& g) {
            return g.p == 1.0 ? (k == 0 ? 1.0 : 0.0)
                              : std::exp(static_cast<double>(k) * std::log1p(-g.p)) * g.p;
          },
          [k](const Poisson& p) { return poisson_pmf(p.lambda, k); },
          [k](const FiniteUniform& u) {
            return (k >= 1 && k <= u.size) ? 1.0 / static_cast<double>(u.size) : 0.0;
          },
          [k](const Explicit& e) {
            return static_cast<std::size_t>(k) < e.pmf.size() ? e.pmf[static_cast<std::size_t>(k)]
                                                              : 0.0;
          },
      },
      law);
}

double tail(const DiscreteLaw& law, std::int64_t k) {
  validate(law);
  if (k < 0) return 1.0;
  return std::visit(
      Overloaded{
          [k](const Binomial& b) {
            if (k >= b.n) return 0.0;
            auto term = [&](std::int64_t j) { return binomial_pmf(b.n, b.p, j); };
            if (static_cast<double>(k) < static_cast<double>(b.n) * b.p)
              return std::max(0.0, 1.0 - lower_sum(k, term));
            double sum = 0.0;
            for (std::int64_t j = k + 1; j <= b.n; ++j) sum += term(j);
            return sum;
          },
          [k](const Geometric& g) {
            return g.p == 1.0 ? 0.0 : std::exp(static_cast<double>(k + 1) * std::log1p(-g.p));
          },
          [k](const Poisson& p) {
            auto term = [&](std::int64_t j) { return poisson_pmf(p.lambda, j); };
            if (static_cast<double>(k) < p.lambda) return std::max(0.0, 1.0 - lower_sum(k, term));
            return upper_series(k, term);
          },
          [k](const FiniteUniform& u) {
            if (k >= u.size) return 0.0;
            return static_cast<double>(u.size - std::max<std::int64_t>(k, 0)) /
                   static_cast<double>(u.size);
          },
          [k](const Explicit& e) {
            double sum = 0.0;
            for (std::size_t j = static_cast<std::size_t>(k) + 1; j < e.pmf.size(); ++j)
              sum += e.pmf[j];
            return sum;
          },
      },
      law);
}

double cdf(const DiscreteLaw& law, std::int64_t k) { return 1.0 - tail(law, k); }

std::int64_t support_max(const DiscreteLaw& law) {
  return std::visit(Overloaded{
                        [](const Binomial& b) { return b.n; },
                        [](const Geometric& g) { return g.p == 1.0 ? std::int64_t{0} : -1; },
                        [](const Poisson&) { return std::int64_t{-1}; },
                        [](const FiniteUniform& u) { return u.size; },
                        [](const Explicit& e) { return static_cast<std::int64_t>(e.pmf.size()) - 1; },
                    },
                    law);
}

std::vector<double> pmf_table(const DiscreteLaw& law, std::int64_t k_max) {
  require(k_max >= 0, "pmf_table: k_max must be >= 0");
  std::vector<double> table(static_cast<std::size_t>(k_max) + 1);
  for (std::int64_t k = 0; k <= k_max; ++k) table[static_cast<std::size_t>(k)] = pmf(law, k);
  return table;
}

double density(const ContinuousLaw& law, double x) {
  validate(law);
  return std::visit(Overloaded{
                        [x](const Exponential& e) { return x < 0.0 ? 0.0 : e.lambda * std::exp(-e.lambda * x); },
                        [x](const Normal& n) {
                          const double d = x - n.mu;
                          return std::exp(-d * d / (2.0 * n.sigma2)) /
                                 std::sqrt(2.0 * std::numbers::pi * n.sigma2);
                        },
                        [x](const Uniform& u) { return (x >= u.a && x <= u.b) ? 1.0 / (u.b - u.a) : 0.0; },
                    },
                    law);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double standard_normal_quantile(double probability) {
  require(probability > 0.0 && probability < 1.0, "normal quantile: probability must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x = 0.0;
  if (probability < low) {
    const double q = std::sqrt(-2.0 * std::log(probability));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (probability <= 1.0 - low) {
    const double q = probability - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-probability));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement. Work with the smaller tail to keep relative precision.
  const double e = probability < 0.5 ? standard_normal_cdf(x) - probability
                                     : (1.0 - probability) - standard_normal_cdf(-x);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double cdf(const ContinuousLaw& law, double x) {
  validate(law);
  return std::visit(Overloaded{
                        [x](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.lambda * x); },
                        [x](const Normal& n) { return standard_normal_cdf((x - n.mu) / std::sqrt(n.sigma2)); },
                        [x](const Uniform& u) {
                          if (x <= u.a) return 0.0;
                          if (x >= u.b) return 1.0;
                          return (x - u.a) / (u.b - u.a);
                        },
                    },
                    law);
}

LawSummary moments(const DiscreteLaw& law) {
  validate(law);
  // Collect the pmf over the support, truncating infinite supports once the
  // remaining tail mass is below kSeriesTail.
  std::vector<double> mass;
  const std::int64_t top = support_max(law);
  if (top >= 0) {
    mass = pmf_table(law, top);
  } else {
    double running = 0.0;
    for (std::int64_t k = 0;; ++k) {
      mass.push_back(pmf(law, k));
      running += mass.back();
      // The running complement is only a cheap pre-filter; the stopping
      // decision uses the accurately computed tail.
      if (1.0 - running < 1e-9 && tail(law, k) < kSeriesTail) break;
      if (k > 100000000) throw ConvergenceError("moments: series did not converge");
    }
  }
  double mean = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) mean += static_cast<double>(k) * mass[k];
  double variance = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double dev = static_cast<double>(k) - mean;
    variance += dev * dev * mass[k];
  }
  return {mean, variance};
}

LawSummary moments(const ContinuousLaw& law) {
  validate(law);
  return std::visit(Overloaded{
                        [](const Exponential& e) {
                          return LawSummary{1.0 / e.lambda, 1.0 / (e.lambda * e.lambda)};
                        },
                        [](const Normal& n) { return LawSummary{n.mu, n.sigma2}; },
                        [](const Uniform& u) {
                          const double w = u.b - u.a;
                          return LawSummary{0.5 * (u.a + u.b), w * w / 12.0};
                        },
                    },
                    law);
}

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
  require(n >= 0 && is_probability(p), "sample_binomial: invalid parameters");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  // Inversion over the support enumerated as mode, mode+1, mode-1, mode+2, ...
  // Any fixed enumeration order gives an exact sampler; starting at the mode
  // keeps the expected work at O(sqrt(n p (1-p))).
  const auto mode = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * p)), 0, n);
  const double odds = p / (1.0 - p);
  const double mode_mass = binomial_pmf(n, p, mode);
  double u = rng.uniform();
  if (u < mode_mass) return mode;
  u -= mode_mass;
  std::int64_t hi = mode;
  std::int64_t lo = mode;
  double hi_mass = mode_mass;
  double lo_mass = mode_mass;
  while (hi < n || lo > 0) {
    if (hi < n) {
      hi_mass *= static_cast<double>(n - hi) / static_cast<double>(hi + 1) * odds;
      ++hi;
      if (u < hi_mass) return hi;
      u -= hi_mass;
    }
    if (lo > 0) {
      lo_mass *= static_cast<double>(lo) / static_cast<double>(n - lo + 1) / odds;
      --lo;
      if (u < lo_mass) return lo;
      u -= lo_mass;
    }
  }
  return mode;  // u exceeded the rounded total mass
}

std::int64_t sample_one(const DiscreteLaw& law, RngStream& rng) {
  validate(law);
  return std::visit(
      Overloaded{
          [&rng](const Binomial& b) { return sample_binomial(b.n, b.p, rng); },
          [&rng](const Geometric& g) -> std::int64_t {
            if (g.p == 1.0) return 0;
            return static_cast<std::int64_t>(std::floor(std::log(rng.uniform_open()) / std::log1p(-g.p)));
          },
          [&rng](const Poisson& p) {
            std::int64_t count = 0;
            for (double t = rng.exponential(p.lambda); t <= 1.0; t += rng.exponential(p.lambda))
              ++count;
            return count;
          },
          [&rng](const FiniteUniform& u) {
            return 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(u.size)));
          },
          [&rng](const Explicit& e) {
            double u = rng.uniform();
            for (std::size_t k = 0; k < e.pmf.size(); ++k) {
              if (u < e.pmf[k]) return static_cast<std::int64_t>(k);
              u -= e.pmf[k];
            }
            // Rounding left u above the table mass: return the last supported value.
            for (std::size_t k = e.pmf.size(); k-- > 0;)
              if (e.pmf[k] > 0.0) return static_cast<std::int64_t>(k);
            return std::int64_t{0};
          },
      },
      law);
}

double sample_one(const ContinuousLaw& law, RngStream& rng) {
  validate(law);
  return std::visit(Overloaded{
                        [&rng](const Exponential& e) { return rng.exponential(e.lambda); },
                        [&rng](const Normal& n) { return n.mu + std::sqrt(n.sigma2) * rng.standard_normal(); },
                        [&rng](const Uniform& u) { return u.a + (u.b - u.a) * rng.uniform(); },
                    },
                    law);
}

std::vector<double> sample(const DiscreteLaw& law, RngStream& rng, std::size_t count) {
  require(count >= 1, "sample: count must be >= 1");
  std::vector<double> out(count);
  for (auto& v : out) v = static_cast<double>(sample_one(law, rng));
  return out;
}

std::vector<double> sample(const ContinuousLaw& law, RngStream& rng, std::size_t count) {
  require(count >= 1, "sample: count must be >= 1");
  std::vector<double> out(count);
  for (auto& v : out) v = sample_one(law, rng);
  return out;
}

Explicit induced_law(std::int64_t domain_size,
                     const std::function<std::int64_t(std::int64_t)>& map) {
  require(domain_size >= 1, "induced_law: domain_size must be >= 1");
  std::vector<std::int64_t> values(static_cast<std::size_t>(domain_size));
  std::int64_t top = 0;
  for (std::int64_t w = 0; w < domain_size; ++w) {
    const std::int64_t v = map(w);
    require(v >= 0, "induced_law: map must take non-negative integer values");
    values[static_cast<std::size_t>(w)] = v;
    top = std::max(top, v);
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(top) + 1, 0);
  for (auto v : values) ++counts[static_cast<std::size_t>(v)];
  Explicit law;
  law.pmf.resize(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v)
    law.pmf[v] = static_cast<double>(counts[v]) / static_cast<double>(domain_size);
  return law;
}

}  // namespace workbench::laws
