#include "workbench/genetics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <ostream>

#include "csv_detail.hpp"
#include "math_detail.hpp"
#include "workbench/error.hpp"
#include "workbench/laws.hpp"

namespace workbench::genetics {
namespace {

using detail::require;

bool is_proportion(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

GenotypeFreqs hardy_weinberg(const GeneFreqs& genes) {
  return {genes.p_a * genes.p_a, 2.0 * genes.p_a * genes.p_b, genes.p_b * genes.p_b};
}

struct Stepping {
  std::size_t steps = 0;
  double h = 0.0;
};

Stepping plan_steps(const Coefficient& a, const Coefficient& b, const std::vector<double>& x,
                    const DiffusionGridSpec& spec, double t_end) {
  require(std::isfinite(t_end) && t_end >= 0.0, "diffusion: time span must be >= 0");
  const double dx = x[1] - x[0];
  double max_a = 0.0;
  double max_b = 0.0;
  for (double xi : x) {
    const double ai = a(xi);
    require(std::isfinite(ai) && ai >= 0.0, "diffusion: coefficient a must be >= 0 on [0, 1]");
    max_a = std::max(max_a, ai);
    if (b) max_b = std::max(max_b, std::abs(b(xi)));
  }
  double dt = 0.0;
  if (spec.dt) {
    dt = *spec.dt;
    require(std::isfinite(dt) && dt > 0.0, "diffusion: dt must be > 0");
  } else if (max_a > 0.0) {
    dt = 0.4 * dx * dx / max_a;
  } else if (max_b > 0.0) {
    dt = 0.4 * dx / max_b;
  } else {
    dt = std::max(t_end, 1.0);
  }
  if (max_a > 0.0 && dt > dx * dx / max_a)
    throw StabilityError("diffusion: dt exceeds the stability bound dx^2 / max a");
  if (max_b > 0.0 && dt > dx / max_b)
    throw StabilityError("diffusion: dt exceeds the drift bound dx / max |b|");
  Stepping s;
  s.h = dt;
  if (t_end == 0.0) return s;
  s.steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
  s.steps = std::max<std::size_t>(s.steps, 1);
  s.h = t_end / static_cast<double>(s.steps);
  return s;
}

}  // namespace

void validate(const GenotypeFreqs& g) {
  require(is_proportion(g.p_aa) && is_proportion(g.p_ab) && is_proportion(g.p_bb),
          "genotype frequencies must lie in [0, 1]");
  require(std::abs(g.p_aa + g.p_ab + g.p_bb - 1.0) <= 1e-12,
          "genotype frequencies must sum to 1 within 1e-12");
}

GeneFreqs gene_frequencies(const GenotypeFreqs& g) {
  validate(g);
  return {g.p_aa + 0.5 * g.p_ab, g.p_bb + 0.5 * g.p_ab};
}

MatingProbabilities mating_probabilities(const GenotypeFreqs& g) {
  validate(g);
  return {g.p_aa * g.p_aa,       g.p_ab * g.p_ab,       g.p_bb * g.p_bb,
          2.0 * g.p_aa * g.p_ab, 2.0 * g.p_aa * g.p_bb, 2.0 * g.p_ab * g.p_bb};
}

GenotypeFreqs next_generation(const GenotypeFreqs& g) { return hardy_weinberg(gene_frequencies(g)); }

PhenotypeInference infer_from_recessive_phenotype(double observed_fraction) {
  require(std::isfinite(observed_fraction) && observed_fraction > 0.0 && observed_fraction <= 1.0,
          "infer_from_recessive_phenotype: fraction must lie in (0, 1]");
  PhenotypeInference out;
  out.genes.p_b = std::sqrt(observed_fraction);
  out.genes.p_a = 1.0 - out.genes.p_b;
  out.genotypes = hardy_weinberg(out.genes);
  return out;
}

WrightFisherModel::WrightFisherModel(std::int64_t two_n) : two_n_(two_n) {
  require(two_n >= 2 && two_n % 2 == 0, "Wright-Fisher: 2N must be a positive even integer");
}

double wf_transition_pmf(const WrightFisherModel& model, std::int64_t j, std::int64_t k) {
  const std::int64_t n = model.two_n();
  require(j >= 0 && j <= n && k >= 0 && k <= n, "wf_transition_pmf: counts must lie in 0..2N");
  const double nd = static_cast<double>(n);
  return detail::binomial_pmf_saddle(n, static_cast<double>(j) / nd, static_cast<double>(n - j) / nd, k);
}

markov::TransitionMatrix wf_transition_matrix(const WrightFisherModel& model) {
  const auto size = static_cast<std::size_t>(model.two_n()) + 1;
  std::vector<double> entries(size * size);
  for (std::size_t j = 0; j < size; ++j) {
    double row_sum = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      entries[j * size + k] = wf_transition_pmf(model, static_cast<std::int64_t>(j), static_cast<std::int64_t>(k));
      row_sum += entries[j * size + k];
    }
    // Log-space pmf rounding leaves rows a few ulp away from 1.
    for (std::size_t k = 0; k < size; ++k) entries[j * size + k] /= row_sum;
  }
  return markov::TransitionMatrix(size, std::move(entries));
}

WrightFisherRun simulate_wright_fisher(const WrightFisherModel& model, std::int64_t x0,
                                       std::int64_t max_generations, RngStream& rng,
                                       bool keep_trajectory) {
  const std::int64_t n = model.two_n();
  require(x0 > 0 && x0 < n, "simulate_wright_fisher: requires 0 < x0 < 2N");
  require(max_generations >= 0, "simulate_wright_fisher: max_generations must be >= 0");
  WrightFisherRun run;
  std::int64_t x = x0;
  if (keep_trajectory) run.trajectory.push_back(x);
  while (run.generations < max_generations) {
    x = laws::sample_binomial(n, static_cast<double>(x) / static_cast<double>(n), rng);
    ++run.generations;
    if (keep_trajectory) run.trajectory.push_back(x);
    if (x == 0 || x == n) {
      run.absorbed_at = x;
      break;
    }
  }
  if (!keep_trajectory) run.trajectory.push_back(x);
  return run;
}

nlohmann::json to_json(const WrightFisherRun& run) {
  nlohmann::json doc;
  doc["generations"] = run.generations;
  doc["final_count"] = run.trajectory.empty() ? 0 : run.trajectory.back();
  doc["absorbed"] = run.absorbed_at.has_value();
  doc["absorbed_at"] = run.absorbed_at ? nlohmann::json(*run.absorbed_at) : nlohmann::json(nullptr);
  doc["fixed"] = run.fixed();
  return doc;
}

std::vector<double> fixation_probabilities_exact(const WrightFisherModel& model) {
  const std::int64_t n = model.two_n();
  const auto interior = static_cast<Eigen::Index>(n - 1);
  std::vector<double> h(static_cast<std::size_t>(n) + 1, 0.0);
  h.back() = 1.0;
  if (interior == 0) return h;
  // (I - Q) h_interior = P(., 2N), Q the interior-to-interior block.
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(interior, interior);
  Eigen::VectorXd rhs(interior);
  for (Eigen::Index r = 0; r < interior; ++r) {
    const std::int64_t j = r + 1;
    for (Eigen::Index c = 0; c < interior; ++c) system(r, c) -= wf_transition_pmf(model, j, c + 1);
    rhs(r) = wf_transition_pmf(model, j, n);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  if (!(std::abs(lu.determinant()) > 0.0))
    throw DegenerateError("fixation_probability_exact: singular absorption system");
  const Eigen::VectorXd solution = lu.solve(rhs);
  for (Eigen::Index r = 0; r < interior; ++r) {
    require(std::isfinite(solution(r)), "fixation_probability_exact: non-finite solution");
    h[static_cast<std::size_t>(r + 1)] = solution(r);
  }
  return h;
}

double fixation_probability_exact(const WrightFisherModel& model, std::int64_t x0) {
  require(x0 >= 0 && x0 <= model.two_n(), "fixation_probability_exact: x0 must lie in 0..2N");
  if (x0 == 0) return 0.0;
  if (x0 == model.two_n()) return 1.0;
  return fixation_probabilities_exact(model)[static_cast<std::size_t>(x0)];
}

double conditional_mean_check(const WrightFisherModel& model, std::int64_t j) {
  require(j >= 0 && j <= model.two_n(), "conditional_mean_check: j must lie in 0..2N");
  long double sum = 0.0L;
  for (std::int64_t k = 0; k <= model.two_n(); ++k)
    sum += static_cast<long double>(k) * wf_transition_pmf(model, j, k);
  return static_cast<double>(sum);
}

double DiffusionGrid::interior_mass() const {
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < density.size(); ++i) sum += density[i];
  const double ends = 0.5 * (density.front() + density.back());
  return (sum + ends) * dx();
}

double DiffusionGrid::total_first_moment() const {
  return expectation([](double x) { return x; });
}

double DiffusionGrid::expectation(const Coefficient& phi) const {
  double sum = 0.0;
  const std::size_t last = density.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const double weight = (i == 0 || i == last) ? 0.5 : 1.0;
    sum += weight * density[i] * phi(x_points[i]);
  }
  return sum * dx() + phi(0.0) * absorbed_mass_0 + phi(1.0) * absorbed_mass_1;
}

std::vector<double> diffusion_grid_points(std::size_t points) {
  require(points >= 3, "diffusion grid: needs at least 3 points");
  std::vector<double> x(points);
  for (std::size_t i = 0; i < points; ++i)
    x[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return x;
}

DiffusionGrid solve_kolmogorov_forward(const Coefficient& a, const Coefficient& b,
                                       std::span<const double> initial_density,
                                       const DiffusionGridSpec& spec, double t_end,
                                       const DiffusionObserver& observer) {
  DiffusionGrid grid;
  grid.x_points = diffusion_grid_points(spec.points);
  require(initial_density.size() == spec.points, "forward diffusion: initial density size mismatch");
  const auto plan = plan_steps(a, b, grid.x_points, spec, t_end);
  grid.dt = plan.h;

  const std::size_t m = spec.points - 1;
  const double dx = grid.dx();
  grid.density.assign(initial_density.begin(), initial_density.end());
  for (double v : grid.density)
    require(std::isfinite(v) && v >= 0.0, "forward diffusion: initial density must be >= 0");
  grid.density.front() = 0.0;
  grid.density.back() = 0.0;
  const double mass = grid.interior_mass();
  require(mass > 0.0, "forward diffusion: initial density has no interior mass");
  for (double& v : grid.density) v /= mass;
  if (plan.steps == 0) return grid;

  std::vector<double> a_at(m + 1), b_at(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    a_at[i] = a(grid.x_points[i]);
    b_at[i] = b ? b(grid.x_points[i]) : 0.0;
  }
  const double h = plan.h;
  const double diff_coef = h / (2.0 * dx * dx);
  const double drift_coef = h / (2.0 * dx);
  std::vector<double> g(m + 1), flux(m + 1), next(m + 1, 0.0);
  for (std::size_t step = 0; step < plan.steps; ++step) {
    for (std::size_t i = 0; i <= m; ++i) {
      g[i] = a_at[i] * grid.density[i];
      flux[i] = b_at[i] * grid.density[i];
    }
    for (std::size_t i = 1; i < m; ++i) {
      next[i] = grid.density[i] + diff_coef * (g[i + 1] - 2.0 * g[i] + g[i - 1]) -
                drift_coef * (flux[i + 1] - flux[i - 1]);
    }
    // Mass leaving the interior through each boundary during this step.
    grid.absorbed_mass_0 += h * (g[1] / (2.0 * dx) - 0.5 * flux[1]);
    grid.absorbed_mass_1 += h * (g[m - 1] / (2.0 * dx) + 0.5 * flux[m - 1]);
    next[0] = 0.0;
    next[m] = 0.0;
    grid.density.swap(next);
    grid.time = h * static_cast<double>(step + 1);
    if (observer) observer(grid);
  }
  grid.time = t_end;
  return grid;
}

ValueFunction solve_kolmogorov_backward(const Coefficient& a, const Coefficient& b,
                                        const Coefficient& terminal, const DiffusionGridSpec& spec,
                                        double t_span) {
  ValueFunction u;
  u.x_points = diffusion_grid_points(spec.points);
  const auto plan = plan_steps(a, b, u.x_points, spec, t_span);
  u.dt = plan.h;
  const std::size_t m = spec.points - 1;
  const double dx = u.x_points[1] - u.x_points[0];
  u.values.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) u.values[i] = terminal(u.x_points[i]);
  if (plan.steps == 0) return u;

  std::vector<double> a_at(m + 1), b_at(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    a_at[i] = a(u.x_points[i]);
    b_at[i] = b ? b(u.x_points[i]) : 0.0;
  }
  const double h = plan.h;
  std::vector<double> next(u.values);
  for (std::size_t step = 0; step < plan.steps; ++step) {
    for (std::size_t i = 1; i < m; ++i) {
      const double second = (u.values[i + 1] - 2.0 * u.values[i] + u.values[i - 1]) / (dx * dx);
      const double first = (u.values[i + 1] - u.values[i - 1]) / (2.0 * dx);
      next[i] = u.values[i] + h * (0.5 * a_at[i] * second + b_at[i] * first);
    }
    u.values.swap(next);
  }
  return u;
}

double wright_fisher_diffusion(double x) { return x * (1.0 - x); }

void write_csv(std::ostream& out, const DiffusionGrid& grid) {
  out << "x,value\n";
  for (std::size_t i = 0; i < grid.x_points.size(); ++i)
    detail::write_row(out, grid.x_points[i], grid.density[i]);
}

void write_csv(std::ostream& out, const ValueFunction& u) {
  out << "x,value\n";
  for (std::size_t i = 0; i < u.x_points.size(); ++i) detail::write_row(out, u.x_points[i], u.values[i]);
}

}  // namespace workbench::genetics
