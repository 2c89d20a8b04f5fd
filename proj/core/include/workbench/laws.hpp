#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "workbench/rng.hpp"

namespace workbench::laws {

// Discrete laws. All live on the non-negative integers.

struct Binomial {
  std::int64_t n = 0;
  double p = 0.0;
};

/// Number of failures before the first success: P{N = k} = (1-p)^k p.
struct Geometric {
  double p = 0.5;
};

struct Poisson {
  double lambda = 1.0;
};

/// Equiprobable outcomes {1, ..., size} (a balanced die for size 6).
struct FiniteUniform {
  std::int64_t size = 6;
};

/// pmf[k] = P{X = k} for k = 0 .. pmf.size()-1.
struct Explicit {
  std::vector<double> pmf;
};

using DiscreteLaw = std::variant<Binomial, Geometric, Poisson, FiniteUniform, Explicit>;

// Continuous laws.

struct Exponential {
  double lambda = 1.0;
};

struct Normal {
  double mu = 0.0;
  double sigma2 = 1.0;
};

struct Uniform {
  double a = 0.0;
  double b = 1.0;
};

using ContinuousLaw = std::variant<Exponential, Normal, Uniform>;

struct LawSummary {
  double mean = 0.0;
  double variance = 0.0;
};

/// Throws DomainError when the parameters are outside the law's domain.
void validate(const DiscreteLaw& law);
void validate(const ContinuousLaw& law);

// Elementary probability algebra.

/// P(A u B) = P(A) + P(B) - P(A n B).
double union_probability(double p_a, double p_b, double p_ab);
/// P(A | B) = P(A n B) / P(B). Conditioning on a null event throws.
double conditional_probability(double p_ab, double p_b);

// Discrete laws.

double pmf(const DiscreteLaw& law, std::int64_t k);
/// P{X > k}. The geometric tail uses the closed form (1-p)^(k+1).
double tail(const DiscreteLaw& law, std::int64_t k);
/// P{X <= k}.
double cdf(const DiscreteLaw& law, std::int64_t k);
/// Largest value with positive mass, or -1 for infinite support.
std::int64_t support_max(const DiscreteLaw& law);
/// pmf values 0..k_max inclusive (convenience for goodness-of-fit tests).
std::vector<double> pmf_table(const DiscreteLaw& law, std::int64_t k_max);

// Continuous laws.

double density(const ContinuousLaw& law, double x);
/// Distribution function. Normal: 0.5 * erfc(-z / sqrt 2) with the C library
/// erfc, accurate to a few ulp (well below 1e-12 absolute).
double cdf(const ContinuousLaw& law, double x);

/// Standard normal cdf and quantile. The quantile is Acklam's rational
/// approximation polished by one Halley step against standard_normal_cdf.
double standard_normal_cdf(double z);
double standard_normal_quantile(double probability);

/// Mean and variance. Infinite-support series are summed until the remaining
/// tail mass drops below 1e-14; continuous laws use closed forms. Only laws
/// with finite variance are representable.
LawSummary moments(const DiscreteLaw& law);
LawSummary moments(const ContinuousLaw& law);

// Sampling. Deterministic given the stream state.

/// One draw. Binomial: inversion enumerating the support outward from the
/// mode; geometric: inversion of the closed-form tail; Poisson: counting
/// Exponential(lambda) interarrivals in [0, 1].
std::int64_t sample_one(const DiscreteLaw& law, RngStream& rng);
/// One draw. Exponential by inverse cdf; Normal via Box-Muller.
double sample_one(const ContinuousLaw& law, RngStream& rng);

std::vector<double> sample(const DiscreteLaw& law, RngStream& rng, std::size_t count);
std::vector<double> sample(const ContinuousLaw& law, RngStream& rng, std::size_t count);

/// Binomial(n, p) draw; shared by the Wright-Fisher simulator.
std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng);

/// Pushforward of the equiprobable law on {0, .., domain_size-1} through
/// `map`. Values must be non-negative integers.
Explicit induced_law(std::int64_t domain_size,
                     const std::function<std::int64_t(std::int64_t)>& map);

}  // namespace workbench::laws
