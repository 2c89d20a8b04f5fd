// Acceptance suite: one PASS/FAIL line per criterion with its runtime.
// Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "workbench/finance.hpp"
#include "workbench/genetics.hpp"
#include "workbench/laws.hpp"
#include "workbench/markov.hpp"
#include "workbench/parallel.hpp"
#include "workbench/processes.hpp"
#include "workbench/queueing.hpp"
#include "workbench/rng.hpp"
#include "workbench/stats.hpp"
#include "workbench_tools/experiments.hpp"

using namespace workbench;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Verdict {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c);
  return buffer;
}

// Computation times are measured by the caller; `budget` is the runtime bound.
struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Verdict()> body;
};

// 1 -------------------------------------------------------------------------

Verdict one_period_pricing() {
  using namespace finance;
  Verdict v;
  const BinomialMarket m{100.0, 1.2, 0.9, 0.1, 0.5};
  const double q = risk_neutral_q(m);
  const double cu = payoff(OptionKind::call, 100.0, m.s0 * m.u);
  const double cd = payoff(OptionKind::call, 100.0, m.s0 * m.d);
  const double price = price_one_period(m, cu, cd);
  const auto rep = replicate_one_period(m, cu, cd);
  const double price95 =
      price_one_period(m, payoff(OptionKind::call, 95.0, m.s0 * m.u), payoff(OptionKind::call, 95.0, m.s0 * m.d));
  v.require(std::abs(price - 12.12) <= 0.005, "price " + fmt("%.6f", price));
  v.require(std::abs(rep.shares_value - 66.67) <= 0.005, "shares " + fmt("%.6f", rep.shares_value));
  v.require(std::abs(rep.bond + 54.55) <= 0.005, "bond " + fmt("%.6f", rep.bond));
  v.require(std::abs(price95 - 15.15) <= 0.005, "K=95 price " + fmt("%.6f", price95));
  v.require(std::abs(q - 2.0 / 3.0) <= 1e-12, "q " + fmt("%.17g", q));
  v.note(fmt("price %.4f, delta*S0 %.4f, B0 %.4f", price, rep.shares_value, rep.bond) +
         fmt(", K=95 %.4f, |q-2/3| %.1e", price95, std::abs(q - 2.0 / 3.0)));
  return v;
}

// 2 -------------------------------------------------------------------------

Verdict hardy_weinberg() {
  using namespace genetics;
  Verdict v;
  const auto inf = infer_from_recessive_phenotype(0.04);
  v.require(std::abs(inf.genes.p_b - 0.2) <= 1e-12, "P_B");
  v.require(std::abs(inf.genes.p_a - 0.8) <= 1e-12, "P_A");
  v.require(std::abs(inf.genotypes.p_aa - 0.64) <= 1e-12, "P_AA");
  v.require(std::abs(inf.genotypes.p_ab - 0.32) <= 1e-12, "P_AB");
  RngStream rng(kSeed, 2);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform_open(), b = rng.uniform_open(), c = rng.uniform_open();
    const double s = a + b + c;
    const GenotypeFreqs g{a / s, b / s, 1.0 - a / s - b / s};
    const auto once = next_generation(g);
    const auto twice = next_generation(once);
    worst = std::max({worst, std::abs(twice.p_aa - once.p_aa), std::abs(twice.p_ab - once.p_ab),
                      std::abs(twice.p_bb - once.p_bb)});
  }
  v.require(worst <= 1e-12, "fixed point " + fmt("%.2e", worst));
  v.note(fmt("P_B %.15g, P_AB %.15g, max fixed-point gap %.1e", inf.genes.p_b, inf.genotypes.p_ab, worst));
  return v;
}

// 3 -------------------------------------------------------------------------

Verdict mm1_agreement() {
  using namespace queueing;
  Verdict v;
  const MM1Params params{1.0, 2.0};
  const auto a = analyze_mm1(params);
  v.require(std::abs(a.expected_users - 1.0) <= 1e-12, "E[N]");
  v.require(std::abs(a.expected_queue - 0.5) <= 1e-12, "E[N_q]");
  v.require(std::abs(a.expected_wait - 0.5) <= 1e-12, "E[T_q]");

  RngStream rng(kSeed, 3);
  const auto sim = simulate_mm1(params, 100000, rng);
  const auto e_n = batch_estimate(sim, &BatchObservation::time_avg_users, 0.99);
  const auto e_nq = batch_estimate(sim, &BatchObservation::time_avg_queue, 0.99);
  const auto e_tq = batch_estimate(sim, &BatchObservation::mean_wait, 0.99);
  v.require(e_n.covers(a.expected_users), "DES E[N] " + fmt("%.4f +- %.4f", e_n.mean, e_n.half_width));
  v.require(e_nq.covers(a.expected_queue), "DES E[N_q] " + fmt("%.4f +- %.4f", e_nq.mean, e_nq.half_width));
  v.require(e_tq.covers(a.expected_wait), "DES E[T_q] " + fmt("%.4f +- %.4f", e_tq.mean, e_tq.half_width));

  const std::size_t top = 10;
  auto counts = state_counts_at_epochs(sim, 25.0, top);
  double total = 0.0;
  for (double c : counts) total += c;
  counts.pop_back();
  std::vector<double> p(top + 1);
  for (std::size_t n = 0; n <= top; ++n) p[n] = std::pow(a.rho, static_cast<double>(n)) * (1.0 - a.rho);
  const auto chi = stats::chi_square_statistic(counts, p, total, 0.001);
  v.require(chi.passed, "occupancy chi-square " + fmt("%.2f > %.2f", chi.statistic, chi.critical_value));

  const auto little = littles_law_residual_ci(sim, params.lambda, 0.99);
  const auto little_q = littles_law_residual_ci(sim, params.lambda, 0.99, true);
  v.require(little.covers(0.0), "Little L-lambda W");
  v.require(little_q.covers(0.0), "Little L_q-lambda W_q");

  v.note(fmt("E[N] %.4f+-%.4f", e_n.mean, e_n.half_width) + fmt(", E[N_q] %.4f+-%.4f", e_nq.mean, e_nq.half_width) +
         fmt(", E[T_q] %.4f+-%.4f", e_tq.mean, e_tq.half_width) +
         fmt(", chi2 %.2f (crit %.2f, %g dof)", chi.statistic, chi.critical_value, static_cast<double>(chi.dof)) +
         fmt(", Little %.4f+-%.4f", little.mean, little.half_width));
  return v;
}

// 4 -------------------------------------------------------------------------

Verdict transient_to_steady() {
  using namespace markov;
  Verdict v;
  const double rho = 0.5;
  const std::size_t n_max = truncation_level(rho);
  const auto gen = birth_death_generator(BirthDeathRates::constant(1.0, 2.0, n_max));
  Distribution p0(n_max + 1, 0.0);
  p0[0] = 1.0;
  const auto p = integrate_forward_law(gen, p0, 50.0);
  double dist = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n)
    dist = std::max(dist, std::abs(p[n] - std::pow(rho, static_cast<double>(n)) * (1.0 - rho)));
  v.require(dist < 1e-6, "steady-state distance " + fmt("%.2e", dist));

  // Pure birth: p_n(t) = e^{-lambda t} (lambda t)^n / n!.
  const std::size_t birth_top = 60;
  const auto birth = birth_death_generator(BirthDeathRates::constant(1.0, 0.0, birth_top));
  Distribution q0(birth_top + 1, 0.0);
  q0[0] = 1.0;
  double birth_err = 0.0;
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const auto q = integrate_forward_law(birth, q0, t, 0.005);
    double term = std::exp(-t);
    for (std::size_t n = 0; n < birth_top; ++n) {
      birth_err = std::max(birth_err, std::abs(q[n] - term));
      term *= t / static_cast<double>(n + 1);
    }
  }
  v.require(birth_err < 1e-8, "pure-birth error " + fmt("%.2e", birth_err));
  v.note(fmt("N_max %g, |p(50)-rho^n(1-rho)| %.2e, pure-birth max error %.2e", static_cast<double>(n_max), dist,
             birth_err));
  return v;
}

// 5 -------------------------------------------------------------------------

Verdict wright_fisher() {
  using namespace genetics;
  Verdict v;
  const WrightFisherModel big(200);
  double mean_err = 0.0;
  for (std::int64_t j = 0; j <= 200; ++j)
    mean_err = std::max(mean_err, std::abs(conditional_mean_check(big, j) - static_cast<double>(j)));
  v.require(mean_err <= 1e-12, "conditional mean " + fmt("%.2e", mean_err));

  double fix_err = 0.0;
  for (std::int64_t two_n : {4, 20, 100}) {
    const WrightFisherModel m(two_n);
    const auto h = fixation_probabilities_exact(m);
    for (std::int64_t x0 = 0; x0 <= two_n; ++x0)
      fix_err = std::max(fix_err, std::abs(h[x0] - static_cast<double>(x0) / static_cast<double>(two_n)));
    fix_err = std::max(fix_err, std::abs(fixation_probability_exact(m, two_n / 2) - 0.5));
  }
  v.require(fix_err <= 1e-10, "exact fixation " + fmt("%.2e", fix_err));

  const WrightFisherModel small(20);
  const auto fixed = parallel_map(10000, [&](std::size_t i) {
    RngStream rng(kSeed + 5, i);
    return simulate_wright_fisher(small, 10, 1'000'000, rng, false).fixed() ? 1.0 : 0.0;
  });
  const auto ci = stats::mean_ci(fixed, 0.99);
  v.require(ci.covers(0.5), "MC fixation " + fmt("%.4f +- %.4f", ci.mean, ci.half_width));
  v.note(fmt("mean check %.1e, exact-vs-x0/2N %.1e, MC %.4f", mean_err, fix_err, ci.mean) +
         fmt("+-%.4f", ci.half_width));
  return v;
}

// 6 -------------------------------------------------------------------------

Verdict diffusion_pde() {
  using namespace genetics;
  Verdict v;
  const std::size_t points = 201;
  const auto x = diffusion_grid_points(points);
  std::vector<double> f0(points);
  for (std::size_t i = 0; i < points; ++i) f0[i] = std::exp(-0.5 * std::pow((x[i] - 0.5) / 0.1, 2));
  double mass_err = 0.0, moment_err = 0.0, first0 = -1.0;
  const auto last = solve_kolmogorov_forward(wright_fisher_diffusion, {}, f0, {points, std::nullopt}, 1.0,
                                             [&](const DiffusionGrid& g) {
                                               if (first0 < 0.0) first0 = g.total_first_moment();
                                               mass_err = std::max(mass_err, std::abs(g.total_mass() - 1.0));
                                               moment_err = std::max(
                                                   moment_err, std::abs(g.total_first_moment() - first0));
                                             });
  v.require(std::abs(last.time - 1.0) < 1e-9, "forward horizon");
  v.require(mass_err <= 1e-6, "mass " + fmt("%.2e", mass_err));
  v.require(moment_err <= 1e-4, "first moment " + fmt("%.2e", moment_err));

  const auto id = solve_kolmogorov_backward(wright_fisher_diffusion, {}, [](double y) { return y; },
                                            {points, std::nullopt}, 1.0);
  double id_err = 0.0;
  for (std::size_t i = 0; i < points; ++i) id_err = std::max(id_err, std::abs(id.values[i] - id.x_points[i]));
  v.require(id_err <= 1e-6, "backward identity " + fmt("%.2e", id_err));

  // Fixation by time T: terminal indicator of {1}; u(x) -> x as T grows.
  const auto fix = solve_kolmogorov_backward(wright_fisher_diffusion, {},
                                             [](double y) { return y >= 1.0 ? 1.0 : 0.0; },
                                             {points, std::nullopt}, 30.0);
  double fix_err = 0.0;
  for (std::size_t i = 0; i < points; ++i) fix_err = std::max(fix_err, std::abs(fix.values[i] - fix.x_points[i]));
  v.require(fix_err <= 0.02, "fixation profile " + fmt("%.3e", fix_err));
  v.note(fmt("mass %.1e, first moment %.1e, u=x %.1e", mass_err, moment_err, id_err) +
         fmt(", fixation profile at T=30 %.1e", fix_err));
  return v;
}

// 7 -------------------------------------------------------------------------

Verdict distributional_checks() {
  Verdict v;
  const auto w = parallel_map(1000, [](std::size_t i) {
    RngStream rng(kSeed + 7, i);
    return processes::rescale_walk(processes::simulate_random_walk(10000, rng), 10000, 1.0);
  });
  const auto walk_ks = stats::ks_statistic(w, laws::standard_normal_cdf, 0.001);
  v.require(walk_ks.passed, "walk KS " + fmt("%.4f > %.4f", walk_ks.statistic, walk_ks.critical_value));

  const double lambda = 2.0, t = 3.0;
  const auto counts = parallel_map(10000, [&](std::size_t i) {
    RngStream rng(kSeed + 70, i);
    return static_cast<double>(processes::simulate_poisson_process(lambda, t, rng).arrival_times.size());
  });
  const auto chi = stats::chi_square_statistic(stats::histogram(counts, 40),
                                               laws::pmf_table(laws::Poisson{lambda * t}, 40), 10000.0, 0.001);
  v.require(chi.passed, "count chi-square " + fmt("%.2f > %.2f", chi.statistic, chi.critical_value));

  RngStream rng(kSeed + 71);
  const auto path = processes::simulate_poisson_process(lambda, 10000.0, rng);
  const auto gaps = processes::interarrival_times(path);
  const auto gap_ks = stats::ks_statistic(
      gaps, [&](double y) { return laws::cdf(laws::Exponential{lambda}, y); }, 0.001);
  v.require(gap_ks.passed, "interarrival KS " + fmt("%.4f > %.4f", gap_ks.statistic, gap_ks.critical_value));

  double memoryless = 0.0;
  for (double p : {0.05, 0.3, 0.5, 0.9}) {
    const laws::DiscreteLaw g = laws::Geometric{p};
    // P{N >= k} = P{N > k-1}.
    const auto at_least = [&](std::int64_t k) { return k == 0 ? 1.0 : laws::tail(g, k - 1); };
    for (std::int64_t m = 0; m <= 10; ++m)
      for (std::int64_t n = 0; n <= 10; ++n)
        memoryless = std::max(memoryless, std::abs(at_least(m + n) / at_least(m) - at_least(n)));
  }
  for (double rate : {0.5, 1.0, 3.0}) {
    const laws::ContinuousLaw e = laws::Exponential{rate};
    for (double s : {0.1, 0.5, 1.0, 2.0})
      for (double u : {0.1, 0.5, 1.0, 2.0}) {
        const double lhs = (1.0 - laws::cdf(e, (s + u) / rate)) / (1.0 - laws::cdf(e, s / rate));
        memoryless = std::max(memoryless, std::abs(lhs - (1.0 - laws::cdf(e, u / rate))));
      }
  }
  v.require(memoryless <= 1e-12, "memoryless " + fmt("%.2e", memoryless));
  v.note(fmt("walk D %.4f (crit %.4f)", walk_ks.statistic, walk_ks.critical_value) +
         fmt(", counts chi2 %.2f (crit %.2f)", chi.statistic, chi.critical_value) +
         fmt(", gaps D %.4f (crit %.4f)", gap_ks.statistic, gap_ks.critical_value) +
         fmt(", memoryless %.1e", memoryless));
  return v;
}

// 8 -------------------------------------------------------------------------

Verdict martingale_and_parity() {
  using namespace finance;
  Verdict v;
  RngStream rng(kSeed, 8);
  double defect = 0.0, parity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    BinomialMarket m;
    m.s0 = 10.0 + 190.0 * rng.uniform();
    m.d = 0.5 + 0.5 * rng.uniform();
    m.u = m.d + 0.05 + 0.6 * rng.uniform();
    m.r = m.d + (m.u - m.d) * (0.02 + 0.96 * rng.uniform()) - 1.0;
    m.p_up = rng.uniform();
    const std::size_t periods = 1 + rng.below(10);
    const double strike = m.s0 * (0.5 + rng.uniform());
    defect = std::max(defect, discounted_martingale_defect(m, periods));
    const double call = price_multi_period(m, {strike, periods, OptionKind::call}).price;
    const double put = price_multi_period(m, {strike, periods, OptionKind::put}).price;
    const double forward = m.s0 - strike * std::pow(1.0 + m.r, -static_cast<double>(periods));
    parity = std::max(parity, std::abs(call - put - forward));
  }
  v.require(defect < 1e-10, "martingale defect " + fmt("%.2e", defect));
  v.require(parity <= 1e-10, "put-call parity " + fmt("%.2e", parity));

  const GbmParams g{100.0, 0.12, 0.2, 0.05};
  const auto mc = mc_price_european(g, OptionKind::call, 100.0, 1.0, 1'000'000, RngStream(kSeed, 80));
  const double tree = price_multi_period(crr_market(g, 1.0, 1000), {100.0, 1000, OptionKind::call}).price;
  v.require(mc.estimate.covers(tree),
            "MC " + fmt("%.4f +- %.4f vs tree %.4f", mc.estimate.mean, mc.estimate.half_width, tree));
  v.note(fmt("defect %.1e, parity %.1e", defect, parity) +
         fmt(", MC %.4f +- %.4f", mc.estimate.mean, mc.estimate.half_width) + fmt(", tree %.4f", tree));
  return v;
}

// 9 -------------------------------------------------------------------------

Verdict determinism() {
  Verdict v;
  std::size_t compared = 0;
  for (const auto& info : tools::list_experiments()) {
    if (!info.stochastic) continue;
    tools::ExperimentConfig c;
    c.command = info.name;
    c.seed = kSeed;
    c.replications = 3;
    for (const auto& p : info.params)
      if (p.required) c.parameters[p.name] = p.name == "lambda" ? "1" : "2";
    std::vector<std::string> outputs{"json"};
    if (info.has_csv) outputs.push_back("csv");
    for (const auto& out : outputs) {
      c.output = out;
      const auto first = tools::render(tools::run(c), out);
      const auto second = tools::render(tools::run(c), out);
      const auto replay = tools::run(tools::config_from_json(tools::run(c).document["config"]));
      ++compared;
      v.require(first == second, info.name + " (" + out + ") differs between runs");
      if (out == "json") v.require(tools::render(replay, out) == first, info.name + " replay differs");
    }
  }
  v.note(std::to_string(compared) + " seeded reports re-run byte-identical");
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "one-period pricing", 1e-3, one_period_pricing},
      {2, "Hardy-Weinberg", 1e-3, hardy_weinberg},
      {3, "M/M/1 agreement", 30.0, mm1_agreement},
      {4, "transient to steady state", 5.0, transient_to_steady},
      {5, "Wright-Fisher", 60.0, wright_fisher},
      {6, "diffusion PDE", 60.0, diffusion_pde},
      {7, "distributional checks", 60.0, distributional_checks},
      {8, "martingale and parity", 120.0, martingale_and_parity},
      {9, "determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v.passed = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds >= c.budget_seconds)
      v.require(false, fmt("runtime %.4g s over the %.4g s budget", seconds, c.budget_seconds));
    failures += v.passed ? 0 : 1;
    std::printf("%s criterion %d (%s) [%.6f s]: %s\n", v.passed ? "PASS" : "FAIL", c.id, c.title.c_str(),
                seconds, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
