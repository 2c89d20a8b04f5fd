#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workbench/rng.hpp"

namespace workbench::markov {

using Distribution = std::vector<double>;

/// Off-diagonal rate q_{from,to}.
struct RateTriplet {
  std::size_t from = 0;
  std::size_t to = 0;
  double rate = 0.0;
};

/// Generator of a finite, time-homogeneous continuous-time chain on states
/// 0..size-1. Stores the off-diagonal rates row by row; the diagonal is
/// -q_n = -sum_{m != n} q_{nm}, so rows sum to zero by construction.
class GeneratorMatrix {
 public:
  struct Entry {
    std::size_t to;
    double rate;
  };

  /// Duplicate (from, to) pairs are summed. Zero rates are dropped.
  GeneratorMatrix(std::size_t size, std::span<const RateTriplet> rates);

  std::size_t size() const { return rows_.size(); }
  /// q_n, the total rate of leaving state n.
  double exit_rate(std::size_t n) const { return exit_[n]; }
  double max_exit_rate() const { return max_exit_; }
  /// Full generator entry: q_{nm} off the diagonal, -q_n on it.
  double operator()(std::size_t n, std::size_t m) const;
  std::span<const Entry> row(std::size_t n) const { return rows_[n]; }
  std::vector<RateTriplet> triplets() const;

  /// Right-hand side of the forward equation, (p Q)_m = -q_m p_m + sum_k p_k q_{km}.
  void forward_rhs(std::span<const double> p, std::span<double> out) const;
  Distribution forward_rhs(std::span<const double> p) const;

 private:
  std::vector<std::vector<Entry>> rows_;
  std::vector<double> exit_;
  double max_exit_ = 0.0;
};

/// Row-stochastic matrix, dense row-major.
class TransitionMatrix {
 public:
  /// Validates entries >= 0 and row sums equal to 1 within 1e-12.
  TransitionMatrix(std::size_t size, std::vector<double> entries);
  static TransitionMatrix identity(std::size_t size);

  std::size_t size() const { return size_; }
  double operator()(std::size_t n, std::size_t m) const { return entries_[n * size_ + m]; }
  std::span<const double> row(std::size_t n) const {
    return std::span<const double>(entries_).subspan(n * size_, size_);
  }
  const std::vector<double>& entries() const { return entries_; }

  TransitionMatrix operator*(const TransitionMatrix& rhs) const;
  /// Row vector times matrix.
  Distribution left_multiply(std::span<const double> p) const;

 private:
  TransitionMatrix(std::size_t size, std::vector<double> entries, bool validate);
  std::size_t size_;
  std::vector<double> entries_;
};

/// Birth rates lambda_0 .. lambda_{N-1} and death rates mu_1 .. mu_N of a
/// birth-death chain truncated at N = birth.size(); the chain has N+1 states
/// and lambda_N = 0 at the truncation boundary.
struct BirthDeathRates {
  std::vector<double> birth;
  std::vector<double> death;  // death[i] is the rate from state i+1 to i

  std::size_t n_max() const { return birth.size(); }
  /// Constant rates, e.g. the M/M/1 queue truncated at n_max.
  static BirthDeathRates constant(double lambda, double mu, std::size_t n_max);
};

GeneratorMatrix birth_death_generator(const BirthDeathRates& rates);

/// Truncation level N_max = ceil(log(tail) / log(rho)) for a geometric
/// stationary law with ratio rho < 1.
std::size_t truncation_level(double rho, double tail = 1e-10);

/// Default RK4 step 0.05 / max_n q_n (or 1 for a generator with no exits).
double default_step(const GeneratorMatrix& gen);

/// Integrates dp/dt = p Q from p0 over [0, t] with classical fourth-order
/// Runge-Kutta, using ceil(t / dt) equal steps. Requires dt <= 0.1 / max q_n
/// (StabilityError otherwise). Entries that end within -1e-12 of zero are
/// clipped and the vector renormalised; anything more negative throws.
Distribution integrate_forward_law(const GeneratorMatrix& gen, std::span<const double> p0,
                                   double t, double dt);
Distribution integrate_forward_law(const GeneratorMatrix& gen, std::span<const double> p0,
                                   double t);

/// P(s, t) for a time-homogeneous generator; row n is the forward law from
/// the unit mass at n over the duration t - s.
TransitionMatrix transition_probabilities(const GeneratorMatrix& gen, double s, double t,
                                          double dt);

/// max |P(u, s) - P(u, t) P(t, s)| over all entries, for u <= t <= s.
double chapman_kolmogorov_defect(const GeneratorMatrix& gen, double u, double t, double s,
                                 double dt);

/// Detailed-balance product p_n = p_0 prod_{k=1..n} lambda_{k-1} / mu_k,
/// normalised. Throws DegenerateError if a positive birth rate meets a zero
/// death rate (no product-form solution) or the masses overflow.
Distribution stationary_birth_death(const BirthDeathRates& rates);

struct StationaryResult {
  Distribution distribution;
  std::size_t iterations = 0;
  /// False when the chain has several closed classes, so that every mixture
  /// of their stationary laws is stationary too.
  bool unique = true;
};

/// Power iteration p <- p P from p0 (uniform when omitted) until the max-norm
/// of successive differences is below tol. Throws ConvergenceError after
/// max_iterations (periodic chains end up here).
StationaryResult dtmc_stationary(const TransitionMatrix& matrix, double tol = 1e-12,
                                 std::optional<Distribution> p0 = std::nullopt,
                                 std::size_t max_iterations = 1'000'000);

enum class StateClass { absorbing, recurrent, transient };

const char* to_string(StateClass c);

/// Communicating classes (strongly connected components of the graph with an
/// edge n -> m whenever P(n, m) > 0). Returns the class index of each state.
std::vector<std::size_t> communicating_classes(const TransitionMatrix& matrix);

/// absorbing iff P(n, n) = 1; recurrent iff the state's class is closed;
/// transient otherwise.
std::vector<StateClass> classify_states(const TransitionMatrix& matrix);

/// Piecewise-constant trajectory: states[i] is occupied on
/// [jump_times[i], jump_times[i+1]), the last one up to horizon.
struct StatePath {
  std::vector<double> jump_times;
  std::vector<std::size_t> states;
  double horizon = 0.0;
};

/// Exact jump-chain simulation: Exponential(q_n) holding times, next state m
/// with probability q_{nm} / q_n; states with q_n = 0 absorb.
StatePath simulate_ctmc(const GeneratorMatrix& gen, std::size_t start, double horizon,
                        RngStream& rng);

/// (1/horizon) * integral of the state value over [0, horizon].
double ergodic_time_average(const StatePath& path, double horizon);

/// Time spent in each state 0..size-1 over [0, horizon].
std::vector<double> occupation_times(const StatePath& path, double horizon, std::size_t size);

/// State occupied at time t.
std::size_t state_at(const StatePath& path, double t);

// JSON schema: {"size": n, "rates": [[from, to, rate], ...]} for generators,
// {"size": n, "entries": [[from, to, p], ...]} for transition matrices
// (omitted entries are zero), {"size": n, "probabilities": [...]} for laws.
nlohmann::json to_json(const GeneratorMatrix& gen);
GeneratorMatrix generator_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const TransitionMatrix& matrix);
TransitionMatrix transition_matrix_from_json(const nlohmann::json& doc);
nlohmann::json distribution_to_json(std::span<const double> p);
Distribution distribution_from_json(const nlohmann::json& doc);

}  // namespace workbench::markov
