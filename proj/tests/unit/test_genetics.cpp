#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "workbench/error.hpp"
#include "workbench/genetics.hpp"
#include "workbench/markov.hpp"
#include "workbench/parallel.hpp"
#include "workbench/stats.hpp"

using namespace workbench;
using namespace workbench::genetics;

namespace {

GenotypeFreqs random_genotypes(RngStream& rng) {
  const double u = rng.uniform(), v = rng.uniform();
  const double lo = std::min(u, v), hi = std::max(u, v);
  return {lo, hi - lo, 1.0 - hi};
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
  return s;
}

std::vector<double> spike_at_half(std::size_t points) {
  std::vector<double> f(points, 0.0);
  f[points / 2] = 1.0;
  return f;
}

std::vector<double> hump(std::size_t points, double centre, double sd) {
  const auto x = diffusion_grid_points(points);
  std::vector<double> f(points);
  for (std::size_t i = 0; i < points; ++i) f[i] = std::exp(-0.5 * std::pow((x[i] - centre) / sd, 2));
  return f;
}

}  // namespace

TEST_CASE("gene_frequencies") {
  const auto a = gene_frequencies({1, 0, 0});
  CHECK(a.p_a == 1.0);
  CHECK(a.p_b == 0.0);
  const auto b = gene_frequencies({0.64, 0.32, 0.04});
  CHECK(std::abs(b.p_a - 0.8) < 1e-12);
  CHECK(std::abs(b.p_b - 0.2) < 1e-12);
  const auto c = gene_frequencies({0, 1, 0});
  CHECK(c.p_a == 0.5);
  CHECK(c.p_b == 0.5);
  CHECK_THROWS_AS(gene_frequencies({0.5, 0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(gene_frequencies({1.2, -0.2, 0.0}), DomainError);
}

TEST_CASE("mating_probabilities") {
  const auto pure = mating_probabilities({1, 0, 0});
  CHECK(pure.aa_aa == 1.0);
  CHECK(pure.total() == 1.0);
  const auto half = mating_probabilities({0.5, 0.5, 0});
  CHECK(half.aa_aa == 0.25);
  CHECK(half.ab_ab == 0.25);
  CHECK(half.aa_ab == 0.5);
  CHECK(half.bb_bb == 0.0);
  const auto s = mating_probabilities({0.3, 0.4, 0.3});
  CHECK(s.aa_aa == s.bb_bb);
  CHECK(s.aa_ab == s.ab_bb);

  RngStream rng(1);
  for (int i = 0; i < 100; ++i) CHECK(std::abs(mating_probabilities(random_genotypes(rng)).total() - 1.0) < 1e-12);
}

TEST_CASE("next_generation") {
  const auto fixed = next_generation({0.64, 0.32, 0.04});
  CHECK(std::abs(fixed.p_aa - 0.64) < 1e-12);
  CHECK(std::abs(fixed.p_ab - 0.32) < 1e-12);
  CHECK(std::abs(fixed.p_bb - 0.04) < 1e-12);
  const auto het = next_generation({0, 1, 0});
  CHECK(het.p_aa == 0.25);
  CHECK(het.p_ab == 0.5);
  CHECK(het.p_bb == 0.25);
  const auto pure = next_generation({1, 0, 0});
  CHECK(pure.p_aa == 1.0);
  CHECK(pure.p_ab == 0.0);
}

TEST_CASE("offspring law from the mating table") {
  // Mendelian offspring of each pair, weighted by the mating probabilities,
  // reproduce next_generation.
  RngStream rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto g = random_genotypes(rng);
    const auto m = mating_probabilities(g);
    const double aa = m.aa_aa + 0.5 * m.aa_ab + 0.25 * m.ab_ab;
    const double bb = m.bb_bb + 0.5 * m.ab_bb + 0.25 * m.ab_ab;
    const auto n = next_generation(g);
    CHECK(std::abs(n.p_aa - aa) < 1e-12);
    CHECK(std::abs(n.p_bb - bb) < 1e-12);
  }
}

TEST_CASE("infer_from_recessive_phenotype") {
  const auto r = infer_from_recessive_phenotype(0.04);
  CHECK(std::abs(r.genes.p_b - 0.2) < 1e-12);
  CHECK(std::abs(r.genes.p_a - 0.8) < 1e-12);
  CHECK(std::abs(r.genotypes.p_aa - 0.64) < 1e-12);
  CHECK(std::abs(r.genotypes.p_ab - 0.32) < 1e-12);
  const auto all = infer_from_recessive_phenotype(1.0);
  CHECK(all.genotypes.p_bb == 1.0);
  const auto q = infer_from_recessive_phenotype(0.25);
  CHECK(q.genes.p_b == 0.5);
  CHECK(q.genotypes.p_aa == 0.25);
  CHECK(q.genotypes.p_ab == 0.5);
  CHECK_THROWS_AS(infer_from_recessive_phenotype(0.0), DomainError);
  CHECK_THROWS_AS(infer_from_recessive_phenotype(1.1), DomainError);
}

TEST_CASE("property: Hardy-Weinberg equilibrium after one generation") {
  RngStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto g = random_genotypes(rng);
    const auto once = next_generation(g);
    const auto twice = next_generation(once);
    CHECK(std::abs(twice.p_aa - once.p_aa) < 1e-12);
    CHECK(std::abs(twice.p_ab - once.p_ab) < 1e-12);
    CHECK(std::abs(twice.p_bb - once.p_bb) < 1e-12);
    CHECK(std::abs(gene_frequencies(once).p_a - gene_frequencies(g).p_a) < 1e-12);
  }
}

TEST_CASE("wright-fisher transition law") {
  const WrightFisherModel m(4);
  CHECK(wf_transition_pmf(m, 0, 0) == 1.0);
  CHECK(wf_transition_pmf(m, 0, 1) == 0.0);
  CHECK(wf_transition_pmf(m, 4, 4) == 1.0);
  CHECK(std::abs(wf_transition_pmf(m, 2, 0) - std::pow(0.5, 4)) < 1e-15);
  CHECK(std::abs(wf_transition_pmf(m, 2, 2) - oracle::binomial_pmf_enumerated(4, 0.5, 2)) < 1e-15);
  const WrightFisherModel big(60);
  for (std::int64_t j = 0; j <= 60; ++j) {
    double row = 0;
    for (std::int64_t k = 0; k <= 60; ++k) row += wf_transition_pmf(big, j, k);
    CHECK(std::abs(row - 1.0) < 1e-12);
  }
  CHECK(WrightFisherModel::from_individuals(10).two_n() == 20);
  CHECK_THROWS_AS(WrightFisherModel(5), DomainError);
  CHECK_THROWS_AS(WrightFisherModel(0), DomainError);
  CHECK_THROWS_AS(wf_transition_pmf(m, 5, 0), DomainError);

  const auto classes = markov::classify_states(wf_transition_matrix(WrightFisherModel(10)));
  CHECK(classes[0] == markov::StateClass::absorbing);
  CHECK(classes[10] == markov::StateClass::absorbing);
  for (int j = 1; j < 10; ++j) CHECK(classes[j] == markov::StateClass::transient);
}

TEST_CASE("property: wright-fisher martingale") {
  for (std::int64_t two_n : {2, 4, 20, 100, 200}) {
    const WrightFisherModel m(two_n);
    for (std::int64_t j = 0; j <= two_n; ++j)
      CHECK(std::abs(conditional_mean_check(m, j) - static_cast<double>(j)) < 1e-12);
  }
  CHECK(conditional_mean_check(WrightFisherModel(4), 2) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("fixation_probability_exact") {
  const WrightFisherModel four(4);
  CHECK(fixation_probability_exact(four, 0) == 0.0);
  CHECK(fixation_probability_exact(four, 4) == 1.0);

  // Direct 5x5 system: h(0) = 0, h(4) = 1, h(j) - sum_k P(j,k) h(k) = 0.
  std::vector<std::vector<double>> a(5, std::vector<double>(5, 0.0));
  std::vector<double> b(5, 0.0);
  a[0][0] = 1;
  a[4][4] = 1;
  b[4] = 1;
  for (int j = 1; j < 4; ++j)
    for (int k = 0; k <= 4; ++k)
      a[j][k] = (j == k ? 1.0 : 0.0) - oracle::binomial_pmf_enumerated(4, j / 4.0, k);
  const auto h = oracle::solve_dense(a, b);
  CHECK(std::abs(fixation_probability_exact(four, 2) - h[2]) < 1e-12);
  CHECK(std::abs(h[2] - 0.5) < 1e-12);

  for (std::int64_t two_n : {4, 20, 100}) {
    const auto all = fixation_probabilities_exact(WrightFisherModel(two_n));
    for (std::int64_t x0 = 0; x0 <= two_n; ++x0)
      CHECK(std::abs(all[x0] - static_cast<double>(x0) / two_n) < 1e-10);
  }
}

TEST_CASE("simulate_wright_fisher") {
  const WrightFisherModel m(20);
  RngStream rng(4);
  CHECK_THROWS_AS(simulate_wright_fisher(m, 0, 100, rng), DomainError);
  CHECK_THROWS_AS(simulate_wright_fisher(m, 20, 100, rng), DomainError);
  const auto run = simulate_wright_fisher(m, 10, 100000, rng);
  REQUIRE(run.absorbed_at.has_value());
  CHECK((*run.absorbed_at == 0 || *run.absorbed_at == 20));
  CHECK(run.trajectory.front() == 10);
  CHECK(run.trajectory.back() == *run.absorbed_at);
  CHECK(run.trajectory.size() == static_cast<std::size_t>(run.generations) + 1);
  for (auto x : run.trajectory) CHECK((x >= 0 && x <= 20));
  const auto doc = to_json(run);
  CHECK(doc["absorbed_at"] == *run.absorbed_at);
  CHECK(doc["generations"] == run.generations);

  const auto capped = simulate_wright_fisher(WrightFisherModel(2000), 1000, 3, rng);
  CHECK_FALSE(capped.absorbed_at.has_value());
  CHECK(capped.generations == 3);
}

TEST_CASE("wright-fisher fixation frequency") {
  const WrightFisherModel m(20);
  const auto fixed = parallel_map(10000, [&](std::size_t i) {
    RngStream rng(5, i);
    return simulate_wright_fisher(m, 10, 1000000, rng, false).fixed() ? 1.0 : 0.0;
  });
  CHECK(stats::mean_ci(fixed, 0.99).covers(0.5));
}

TEST_CASE("forward solver basics") {
  const std::size_t pts = 201;
  const auto f0 = hump(pts, 0.5, 0.05);
  const auto zero = solve_kolmogorov_forward(wright_fisher_diffusion, {}, f0, {}, 0.0);
  const double norm = trapezoid(zero.x_points, f0);
  for (std::size_t i = 1; i + 1 < pts; ++i) CHECK(std::abs(zero.density[i] - f0[i] / norm) < 1e-12);
  CHECK(zero.dt == doctest::Approx(0.4 * std::pow(1.0 / 200, 2) / 0.25));
  // dx^2 / max a = 1e-4 on 201 points.
  CHECK_THROWS_AS(solve_kolmogorov_forward(wright_fisher_diffusion, {}, f0, {201, 1.1e-4}, 0.1),
                  StabilityError);
  CHECK_NOTHROW(solve_kolmogorov_forward(wright_fisher_diffusion, {}, f0, {201, 0.99e-4}, 0.01));
}

TEST_CASE("heat equation variance growth") {
  const double diffusivity = 0.5;
  const auto a = [&](double) { return 2.0 * diffusivity; };
  const double sd0 = 0.04;
  const auto f = solve_kolmogorov_forward(a, {}, hump(401, 0.5, sd0), {401, std::nullopt}, 0.004);
  double m0 = 0, m1 = 0, m2 = 0;
  const double dx = f.dx();
  for (std::size_t i = 0; i < f.x_points.size(); ++i) {
    m0 += f.density[i] * dx;
    m1 += f.density[i] * f.x_points[i] * dx;
    m2 += f.density[i] * f.x_points[i] * f.x_points[i] * dx;
  }
  const double var = m2 / m0 - std::pow(m1 / m0, 2);
  CHECK(std::abs(var - (sd0 * sd0 + 2 * diffusivity * 0.004)) < 0.01 * var);
  CHECK(f.absorbed_mass_0 + f.absorbed_mass_1 < 1e-6);
}

TEST_CASE("property: forward conservation and mean invariance") {
  for (const auto& f0 : {spike_at_half(201), hump(201, 0.5, 0.1), hump(201, 0.3, 0.05)}) {
    double mass_err = 0, first0 = -1, moment_err = 0;
    const auto last = solve_kolmogorov_forward(
        wright_fisher_diffusion, {}, f0, {}, 1.0, [&](const DiffusionGrid& g) {
          mass_err = std::max(mass_err, std::abs(g.total_mass() - 1.0));
          if (first0 < 0) first0 = g.total_first_moment();
          moment_err = std::max(moment_err, std::abs(g.total_first_moment() - first0));
        });
    CHECK(mass_err < 1e-6);
    CHECK(moment_err < 1e-4);
    for (double v : last.density) CHECK(v >= 0.0);
    CHECK(last.time == doctest::Approx(1.0));
  }
  const auto at_half = solve_kolmogorov_forward(wright_fisher_diffusion, {}, spike_at_half(201), {}, 1.0);
  CHECK(std::abs(at_half.total_first_moment() - 0.5) < 1e-4);
}

TEST_CASE("forward solver against wright-fisher simulation") {
  // One diffusion time unit is 2N generations.
  const std::int64_t two_n = 200;
  const WrightFisherModel m(two_n);
  struct Obs {
    double fixed, het, mean;
  };
  const auto obs = parallel_map(100000, [&](std::size_t i) {
    RngStream rng(6, i);
    const auto run = simulate_wright_fisher(m, 100, two_n, rng, false);
    const double y = static_cast<double>(run.trajectory.back()) / two_n;
    return Obs{run.fixed() ? 1.0 : 0.0, 2 * y * (1 - y), y};
  });
  std::vector<double> fixed, het, mean;
  for (const auto& o : obs) {
    fixed.push_back(o.fixed);
    het.push_back(o.het);
    mean.push_back(o.mean);
  }
  const auto pde = solve_kolmogorov_forward(wright_fisher_diffusion, {}, spike_at_half(201), {}, 1.0);
  CHECK(stats::mean_ci(mean, 0.99).covers(pde.total_first_moment()));
  const double pde_het = pde.expectation([](double x) { return 2 * x * (1 - x); });
  CHECK(std::abs(pde_het - 0.5 * std::exp(-1.0)) < 2e-3);
  // Discrete chain: H_t = H_0 (1 - 1/2N)^t exactly.
  const double chain_het = 0.5 * std::pow(1.0 - 1.0 / two_n, two_n);
  CHECK(stats::mean_ci(het, 0.99).covers(chain_het));
  CHECK(std::abs(stats::mean(het) - pde_het) < 5e-3);
  CHECK(std::abs(stats::mean(fixed) - pde.absorbed_mass_1) < 0.01);
}

TEST_CASE("backward solver") {
  const auto id = [](double x) { return x; };
  const auto u = solve_kolmogorov_backward(wright_fisher_diffusion, {}, id, {}, 2.0);
  for (std::size_t i = 0; i < u.x_points.size(); ++i) CHECK(std::abs(u.values[i] - u.x_points[i]) < 1e-6);

  const auto sq = [](double x) { return x * x; };
  const auto same = solve_kolmogorov_backward(wright_fisher_diffusion, {}, sq, {}, 0.0);
  for (std::size_t i = 0; i < same.x_points.size(); ++i) CHECK(same.values[i] == sq(same.x_points[i]));

  const auto step = [](double x) { return 0.5 * (1.0 + std::tanh((x - 0.9) / 0.02)); };
  const auto far = solve_kolmogorov_backward(wright_fisher_diffusion, {}, step, {}, 30.0);
  const double g0 = step(0.0), g1 = step(1.0);
  const auto h = fixation_probabilities_exact(WrightFisherModel(200));
  for (std::size_t i = 1; i + 1 < far.x_points.size(); ++i) {
    const double x = far.x_points[i];
    CHECK(std::abs(far.values[i] - x) < 0.02);
    CHECK(std::abs(far.values[i] - (g0 + (g1 - g0) * h[i])) < 0.02);
  }
}

TEST_CASE("property: backward and forward solves are dual") {
  const auto drift = [](double x) { return 0.3 * (0.5 - x); };
  struct Case {
    Coefficient b;
    Coefficient g;
  };
  const std::vector<Case> cases = {
      {{}, [](double x) { return x * x; }},
      {{}, [](double x) { return std::sin(3 * x); }},
      {drift, [](double x) { return x * x; }},
      {drift, [](double x) { return std::exp(-x); }},
  };
  for (const auto& c : cases)
    for (const auto& f0 : {hump(201, 0.5, 0.1), hump(201, 0.35, 0.08)}) {
      const double t = 0.8;
      const auto fwd = solve_kolmogorov_forward(wright_fisher_diffusion, c.b, f0, {}, t);
      const auto bwd = solve_kolmogorov_backward(wright_fisher_diffusion, c.b, c.g, {}, t);
      std::vector<double> f0n(f0.size());
      const double norm = [&] {
        auto inner = f0;
        inner.front() = inner.back() = 0.0;
        return trapezoid(fwd.x_points, inner);
      }();
      for (std::size_t i = 0; i < f0.size(); ++i)
        f0n[i] = (i == 0 || i + 1 == f0.size()) ? 0.0 : f0[i] / norm * bwd.values[i];
      CHECK(std::abs(fwd.expectation(c.g) - trapezoid(fwd.x_points, f0n)) < 1e-3);
    }
}

TEST_CASE("diffusion csv export") {
  const auto u = solve_kolmogorov_backward(wright_fisher_diffusion, {}, [](double x) { return x; },
                                           {5, std::nullopt}, 0.0);
  std::ostringstream out;
  write_csv(out, u);
  CHECK(out.str() == "x,value\n0,0\n0.25,0.25\n0.5,0.5\n0.75,0.75\n1,1\n");
}
