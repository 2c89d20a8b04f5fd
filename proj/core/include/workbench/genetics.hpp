#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workbench/markov.hpp"
#include "workbench/rng.hpp"

namespace workbench::genetics {

struct GenotypeFreqs {
  double p_aa = 1.0;
  double p_ab = 0.0;
  double p_bb = 0.0;
};

struct GeneFreqs {
  double p_a = 1.0;
  double p_b = 0.0;
};

void validate(const GenotypeFreqs& g);

/// P_A = P_AA + P_AB / 2, P_B = P_BB + P_AB / 2.
GeneFreqs gene_frequencies(const GenotypeFreqs& g);

/// Probabilities of the six unordered mating pairs under random mating.
struct MatingProbabilities {
  double aa_aa, ab_ab, bb_bb, aa_ab, aa_bb, ab_bb;
  double total() const { return aa_aa + ab_ab + bb_bb + aa_ab + aa_bb + ab_bb; }
};
MatingProbabilities mating_probabilities(const GenotypeFreqs& g);

/// Genotypes of the offspring generation: (P_A^2, 2 P_A P_B, P_B^2).
GenotypeFreqs next_generation(const GenotypeFreqs& g);

struct PhenotypeInference {
  GeneFreqs genes;
  GenotypeFreqs genotypes;
};

/// For a recessive allele B observed in a fraction P_BB of the population at
/// Hardy-Weinberg equilibrium: P_B = sqrt(P_BB).
PhenotypeInference infer_from_recessive_phenotype(double observed_fraction);

/// Wright-Fisher chain on allele counts 0..2N.
class WrightFisherModel {
 public:
  /// From the allele pool size 2N (positive, even).
  explicit WrightFisherModel(std::int64_t two_n);
  static WrightFisherModel from_individuals(std::int64_t individuals) {
    return WrightFisherModel(2 * individuals);
  }
  std::int64_t two_n() const { return two_n_; }

 private:
  std::int64_t two_n_;
};

/// Binomial(2N, j / 2N) pmf at k.
double wf_transition_pmf(const WrightFisherModel& model, std::int64_t j, std::int64_t k);

/// The full (2N+1) x (2N+1) transition matrix.
markov::TransitionMatrix wf_transition_matrix(const WrightFisherModel& model);

struct WrightFisherRun {
  std::vector<std::int64_t> trajectory;  // X_0, X_1, ...
  std::optional<std::int64_t> absorbed_at;  // 0 or 2N when absorbed
  std::int64_t generations = 0;           // generations simulated
  bool fixed() const { return absorbed_at && *absorbed_at != 0; }
};

/// Iterates binomial resampling from x0 (0 < x0 < 2N) until absorption or
/// max_generations. With keep_trajectory false only the endpoint is kept.
WrightFisherRun simulate_wright_fisher(const WrightFisherModel& model, std::int64_t x0,
                                       std::int64_t max_generations, RngStream& rng,
                                       bool keep_trajectory = true);

nlohmann::json to_json(const WrightFisherRun& run);

/// Probability of absorption at 2N from x0, from the linear system
/// h(j) = sum_k P(j, k) h(k), h(0) = 0, h(2N) = 1 over the interior states.
double fixation_probability_exact(const WrightFisherModel& model, std::int64_t x0);
/// h(j) for all j = 0..2N.
std::vector<double> fixation_probabilities_exact(const WrightFisherModel& model);

/// sum_k k P(j, k); equals j for the neutral chain.
double conditional_mean_check(const WrightFisherModel& model, std::int64_t j);

// Diffusion approximation on [0, 1].

using Coefficient = std::function<double(double)>;

struct DiffusionGridSpec {
  std::size_t points = 201;
  /// Time step; defaults to 0.4 dx^2 / max a.
  std::optional<double> dt;
};

struct DiffusionGrid {
  std::vector<double> x_points;
  double dt = 0.0;
  double time = 0.0;
  std::vector<double> density;
  double absorbed_mass_0 = 0.0;
  double absorbed_mass_1 = 0.0;

  double dx() const { return x_points[1] - x_points[0]; }
  /// Trapezoidal mass of the interior density.
  double interior_mass() const;
  double total_mass() const { return interior_mass() + absorbed_mass_0 + absorbed_mass_1; }
  /// First moment including the atom at 1.
  double total_first_moment() const;
  /// integral f(x) phi(x) dx + phi(0) m_0 + phi(1) m_1.
  double expectation(const Coefficient& phi) const;
};

/// Called after every step of the forward solver.
using DiffusionObserver = std::function<void(const DiffusionGrid&)>;

std::vector<double> diffusion_grid_points(std::size_t points);

/// Explicit finite differences for df/dt = 1/2 d2(a f)/dx2 - d(b f)/dx with
/// absorbing boundaries; an empty `b` means zero drift. The density on the two boundary nodes is held at 0;
/// the discrete flux leaving through each boundary is added to the absorbed
/// masses, so interior mass plus absorbed mass is conserved to rounding.
/// `initial_density` holds samples on the grid and is renormalised by the
/// trapezoidal rule after its boundary samples are dropped. Throws
/// StabilityError if dt > dx^2 / max a.
DiffusionGrid solve_kolmogorov_forward(const Coefficient& a, const Coefficient& b,
                                       std::span<const double> initial_density,
                                       const DiffusionGridSpec& grid, double t_end,
                                       const DiffusionObserver& observer = {});

struct ValueFunction {
  std::vector<double> x_points;
  std::vector<double> values;
  double dt = 0.0;
};

/// Explicit finite differences for -du/ds = 1/2 a d2u/dx2 + b du/dx, run
/// backward over t_span from the terminal condition g, with u pinned to g(0)
/// and g(1) at the boundaries. Returns u at the start of the span.
ValueFunction solve_kolmogorov_backward(const Coefficient& a, const Coefficient& b,
                                        const Coefficient& terminal, const DiffusionGridSpec& grid,
                                        double t_span);

/// a(x) = x (1 - x), the Wright-Fisher diffusion coefficient. One unit of
/// diffusion time corresponds to 2N generations.
double wright_fisher_diffusion(double x);

void write_csv(std::ostream& out, const DiffusionGrid& grid);
void write_csv(std::ostream& out, const ValueFunction& u);

}  // namespace workbench::genetics
