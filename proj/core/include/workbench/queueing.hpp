#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "workbench/laws.hpp"
#include "workbench/markov.hpp"
#include "workbench/rng.hpp"
#include "workbench/stats.hpp"

namespace workbench::queueing {

struct MM1Params {
  double lambda = 1.0;  // arrivals per unit time
  double mu = 2.0;      // services per unit time
};

struct MM1Analysis {
  double rho = 0.0;
  std::vector<double> p;  // p_n = rho^n (1 - rho), truncated where the tail drops below the bound
  double expected_users = 0.0;    // E[N]
  double expected_queue = 0.0;    // E[N_q]
  double expected_wait = 0.0;     // E[T_q]
  double expected_sojourn = 0.0;  // E[T] = E[T_q] + 1/mu
};

/// Steady-state M/M/1 results. Throws NoSteadyStateError when rho >= 1.
MM1Analysis analyze_mm1(const MM1Params& params, double truncation_tail = 1e-12);

/// P{T_q <= t}: 1 - rho at t = 0 (the atom of customers who never wait),
/// 1 - rho exp(-mu (1 - rho) t) for t > 0.
double waiting_time_cdf(const MM1Params& params, double t);

enum class EventKind { arrival, departure };
const char* to_string(EventKind kind);

struct QueueEvent {
  double time = 0.0;
  EventKind kind = EventKind::arrival;
  std::size_t customer = 0;
  std::size_t state = 0;  // users in system just after the event
};

/// Per-batch observations over one of the equal-time batches of the
/// observation window.
struct BatchObservation {
  double time_avg_users = 0.0;
  double time_avg_queue = 0.0;
  double busy_fraction = 0.0;
  double mean_wait = 0.0;
  double mean_sojourn = 0.0;
  double zero_wait_fraction = 0.0;
  double arrival_rate = 0.0;
  std::size_t customers = 0;
};

struct QueueSimResult {
  // Customers after the warm-up, in arrival order.
  std::vector<double> arrival_times;
  std::vector<double> per_customer_wait;
  std::vector<double> per_customer_sojourn;

  double window_start = 0.0;
  double window_end = 0.0;
  double time_avg_users = 0.0;
  double time_avg_queue = 0.0;
  double utilization = 0.0;
  std::size_t completed = 0;

  /// Number in system over the observation window, time re-based so that the
  /// window starts at 0.
  markov::StatePath users_path;
  std::vector<BatchObservation> batches;
  /// Full event log when requested.
  std::vector<QueueEvent> events;
};

struct SimulationOptions {
  double warmup_fraction = 0.1;
  std::size_t batches = 20;
  bool record_events = false;
};

/// Event-driven FIFO single-server simulation with Exponential(lambda)
/// interarrivals and Exponential(mu) services for n_customers arrivals.
/// The first warmup_fraction of customers is discarded; time averages cover
/// [arrival of the first kept customer, last arrival]. Events at equal
/// timestamps are processed arrival first.
QueueSimResult simulate_mm1(const MM1Params& params, std::size_t n_customers, RngStream& rng,
                            const SimulationOptions& options = {});

struct LittleResidual {
  double users = 0.0;  // |L - lambda W|
  double queue = 0.0;  // |L_q - lambda W_q|
};

/// Little's-law residuals against the nominal arrival rate. An empty result
/// gives zero residuals by convention.
LittleResidual littles_law_residual(const QueueSimResult& sim, double lambda);

/// Residual series L_b - lambda W_b over the batches (and its queue analogue):
/// the quantity whose batch-means interval should cover zero.
stats::EstimateWithCI littles_law_residual_ci(const QueueSimResult& sim, double lambda,
                                              double level, bool queue_only = false);

/// Batch-means interval for one per-batch observable.
stats::EstimateWithCI batch_estimate(const QueueSimResult& sim,
                                     double BatchObservation::*field, double level);

/// Fraction of the observation window spent with n users, n = 0..max_state;
/// the last entry lumps all states >= max_state.
std::vector<double> state_time_fractions(const QueueSimResult& sim, std::size_t max_state);

/// Users in system observed at window_start + k * spacing (k >= 1), binned
/// 0..max_state with a final bin for >= max_state+1. For goodness-of-fit
/// tests: spacing far beyond the relaxation time makes the observations
/// close to independent.
std::vector<double> state_counts_at_epochs(const QueueSimResult& sim, double spacing,
                                           std::size_t max_state);

/// Transient law of the number in system starting from initial_users, by
/// forward integration of the birth-death generator truncated at n_max.
/// mu = 0 (pure arrivals) is allowed. For rho < 1, n_max must be at least the
/// truncation level for a 1e-10 stationary tail.
markov::Distribution transient_mm1(const MM1Params& params, std::size_t initial_users, double t,
                                   std::size_t n_max);

struct InventoryPolicy {
  std::int64_t reorder_point = 1;  // r
  std::int64_t order_up_to = 5;    // s
  laws::ContinuousLaw demand_interarrival = laws::Exponential{1.0};
  laws::ContinuousLaw lead_time = laws::Exponential{1.0};
  std::int64_t initial_level = 5;
};

struct InventoryMetrics {
  double average_level = 0.0;
  double stockout_fraction = 0.0;  // fraction of time at level 0
  std::uint64_t demands = 0;
  std::uint64_t lost_sales = 0;
  std::uint64_t orders_placed = 0;
  double lost_sale_fraction = 0.0;  // lost_sales / demands, 0 when no demand
  std::int64_t min_level = 0;
  std::int64_t max_level = 0;
  markov::StatePath level_path;
};

/// (r, s) policy with lost sales: unit demands at law-driven interarrivals;
/// when the level drops to r or below and no order is outstanding, an order
/// of s - r units is placed and arrives after a lead-time draw. Demand at
/// level 0 is lost. At most one order is outstanding.
InventoryMetrics simulate_inventory(const InventoryPolicy& policy, double horizon, RngStream& rng);

void write_events_csv(std::ostream& out, const std::vector<QueueEvent>& events);

}  // namespace workbench::queueing
