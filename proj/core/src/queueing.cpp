#include "workbench/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>

#include "csv_detail.hpp"
#include "workbench/error.hpp"

namespace workbench::queueing {
namespace {

using detail::require;

void validate(const MM1Params& params) {
  require(std::isfinite(params.lambda) && params.lambda > 0.0, "M/M/1: lambda must be > 0");
  require(std::isfinite(params.mu) && params.mu > 0.0, "M/M/1: mu must be > 0");
}

double steady_rho(const MM1Params& params) {
  validate(params);
  const double rho = params.lambda / params.mu;
  if (rho >= 1.0)
    throw NoSteadyStateError("M/M/1: rho = " + std::to_string(rho) +
                             " >= 1, no steady state exists (the queue grows without bound)");
  return rho;
}

struct PendingEvent {
  double time;
  EventKind kind;
  std::uint64_t sequence;
  std::size_t customer;
};

// Earliest time first; at equal times arrivals precede departures; then
// insertion order.
struct LaterEvent {
  bool operator()(const PendingEvent& a, const PendingEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind == EventKind::departure;
    return a.sequence > b.sequence;
  }
};

// Integral of f(state) over [a, b] along a piecewise-constant path.
template <typename F>
double integrate_path(const markov::StatePath& path, double a, double b, F&& f) {
  if (b <= a) return 0.0;
  double total = 0.0;
  auto it = std::upper_bound(path.jump_times.begin(), path.jump_times.end(), a);
  std::size_t i = it == path.jump_times.begin()
                      ? 0
                      : static_cast<std::size_t>(it - path.jump_times.begin()) - 1;
  for (; i < path.states.size(); ++i) {
    const double begin = std::max(a, path.jump_times[i]);
    if (begin >= b) break;
    const double end = i + 1 < path.states.size() ? std::min(b, path.jump_times[i + 1]) : b;
    if (end > begin) total += f(path.states[i]) * (end - begin);
  }
  return total;
}

double non_negative_draw(const laws::ContinuousLaw& law, RngStream& rng) {
  return std::max(0.0, laws::sample_one(law, rng));
}

}  // namespace

MM1Analysis analyze_mm1(const MM1Params& params, double truncation_tail) {
  const double rho = steady_rho(params);
  require(truncation_tail > 0.0 && truncation_tail < 1.0, "analyze_mm1: truncation_tail in (0, 1)");
  MM1Analysis a;
  a.rho = rho;
  // P{N >= K} = rho^K; keep states until that drops below the bound.
  double term = 1.0 - rho;
  double tail = 1.0;
  while (tail >= truncation_tail) {
    a.p.push_back(term);
    tail *= rho;
    term *= rho;
  }
  a.expected_users = rho / (1.0 - rho);
  a.expected_queue = rho * rho / (1.0 - rho);
  a.expected_wait = params.lambda / (params.mu * (params.mu - params.lambda));
  a.expected_sojourn = a.expected_wait + 1.0 / params.mu;
  return a;
}

double waiting_time_cdf(const MM1Params& params, double t) {
  const double rho = steady_rho(params);
  require(std::isfinite(t) && t >= 0.0, "waiting_time_cdf: t must be >= 0");
  if (t == 0.0) return 1.0 - rho;
  return 1.0 - rho * std::exp(-params.mu * (1.0 - rho) * t);
}

const char* to_string(EventKind kind) {
  return kind == EventKind::arrival ? "arrival" : "departure";
}

QueueSimResult simulate_mm1(const MM1Params& params, std::size_t n_customers, RngStream& rng,
                            const SimulationOptions& options) {
  validate(params);
  require(n_customers >= 1, "simulate_mm1: n_customers must be >= 1");
  require(options.warmup_fraction >= 0.0 && options.warmup_fraction < 1.0,
          "simulate_mm1: warmup_fraction must lie in [0, 1)");
  require(options.batches >= 2, "simulate_mm1: needs at least two batches");

  std::vector<double> arrival(n_customers, 0.0);
  std::vector<double> wait(n_customers, 0.0);
  std::vector<double> sojourn(n_customers, 0.0);
  markov::StatePath full_path;
  full_path.jump_times.push_back(0.0);
  full_path.states.push_back(0);

  std::priority_queue<PendingEvent, std::vector<PendingEvent>, LaterEvent> calendar;
  std::uint64_t sequence = 0;
  std::deque<std::size_t> waiting;
  bool busy = false;
  std::size_t in_system = 0;
  std::vector<QueueEvent> events;

  calendar.push({rng.exponential(params.lambda), EventKind::arrival, sequence++, 0});
  double now = 0.0;
  while (!calendar.empty()) {
    const PendingEvent ev = calendar.top();
    calendar.pop();
    now = ev.time;
    if (ev.kind == EventKind::arrival) {
      arrival[ev.customer] = now;
      ++in_system;
      if (!busy) {
        busy = true;
        wait[ev.customer] = 0.0;
        calendar.push({now + rng.exponential(params.mu), EventKind::departure, sequence++, ev.customer});
      } else {
        waiting.push_back(ev.customer);
      }
      if (ev.customer + 1 < n_customers)
        calendar.push({now + rng.exponential(params.lambda), EventKind::arrival, sequence++,
                       ev.customer + 1});
    } else {
      sojourn[ev.customer] = now - arrival[ev.customer];
      --in_system;
      if (!waiting.empty()) {
        const std::size_t next = waiting.front();
        waiting.pop_front();
        wait[next] = now - arrival[next];
        calendar.push({now + rng.exponential(params.mu), EventKind::departure, sequence++, next});
      } else {
        busy = false;
      }
    }
    if (now == full_path.jump_times.back())
      full_path.states.back() = in_system;
    else {
      full_path.jump_times.push_back(now);
      full_path.states.push_back(in_system);
    }
    if (options.record_events) events.push_back({now, ev.kind, ev.customer, in_system});
  }
  full_path.horizon = now;

  QueueSimResult result;
  const auto first_kept = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor(options.warmup_fraction * static_cast<double>(n_customers))),
      n_customers - 1);
  result.arrival_times.assign(arrival.begin() + static_cast<std::ptrdiff_t>(first_kept), arrival.end());
  result.per_customer_wait.assign(wait.begin() + static_cast<std::ptrdiff_t>(first_kept), wait.end());
  result.per_customer_sojourn.assign(sojourn.begin() + static_cast<std::ptrdiff_t>(first_kept), sojourn.end());
  result.completed = result.arrival_times.size();
  result.window_start = arrival[first_kept];
  result.window_end = arrival.back();
  result.events = std::move(events);

  const double ws = result.window_start;
  const double we = result.window_end;
  const double length = we - ws;
  auto users = [](std::size_t n) { return static_cast<double>(n); };
  auto queue = [](std::size_t n) { return n > 0 ? static_cast<double>(n - 1) : 0.0; };
  auto busy_indicator = [](std::size_t n) { return n > 0 ? 1.0 : 0.0; };
  if (length > 0.0) {
    result.time_avg_users = integrate_path(full_path, ws, we, users) / length;
    result.time_avg_queue = integrate_path(full_path, ws, we, queue) / length;
    result.utilization = integrate_path(full_path, ws, we, busy_indicator) / length;
  }

  // Window path, re-based to start at zero.
  result.users_path.horizon = length;
  result.users_path.jump_times.push_back(0.0);
  result.users_path.states.push_back(markov::state_at(full_path, ws));
  for (std::size_t i = 0; i < full_path.jump_times.size(); ++i) {
    const double t = full_path.jump_times[i];
    if (t <= ws) continue;
    if (t >= we) break;
    result.users_path.jump_times.push_back(t - ws);
    result.users_path.states.push_back(full_path.states[i]);
  }

  // Equal-time batches; customers are assigned by arrival time.
  if (length > 0.0) {
    const std::size_t b_count = options.batches;
    const double width = length / static_cast<double>(b_count);
    result.batches.resize(b_count);
    std::vector<double> wait_sum(b_count, 0.0), sojourn_sum(b_count, 0.0), zero_count(b_count, 0.0);
    for (std::size_t c = 0; c < result.arrival_times.size(); ++c) {
      auto b = static_cast<std::size_t>((result.arrival_times[c] - ws) / width);
      b = std::min(b, b_count - 1);
      auto& obs = result.batches[b];
      ++obs.customers;
      wait_sum[b] += result.per_customer_wait[c];
      sojourn_sum[b] += result.per_customer_sojourn[c];
      if (result.per_customer_wait[c] == 0.0) zero_count[b] += 1.0;
    }
    for (std::size_t b = 0; b < b_count; ++b) {
      const double a = ws + width * static_cast<double>(b);
      const double e = b + 1 == b_count ? we : a + width;
      auto& obs = result.batches[b];
      obs.time_avg_users = integrate_path(full_path, a, e, users) / (e - a);
      obs.time_avg_queue = integrate_path(full_path, a, e, queue) / (e - a);
      obs.busy_fraction = integrate_path(full_path, a, e, busy_indicator) / (e - a);
      obs.arrival_rate = static_cast<double>(obs.customers) / (e - a);
      if (obs.customers > 0) {
        const auto n = static_cast<double>(obs.customers);
        obs.mean_wait = wait_sum[b] / n;
        obs.mean_sojourn = sojourn_sum[b] / n;
        obs.zero_wait_fraction = zero_count[b] / n;
      }
    }
  }
  return result;
}

LittleResidual littles_law_residual(const QueueSimResult& sim, double lambda) {
  require(lambda >= 0.0, "littles_law_residual: lambda must be >= 0");
  if (sim.per_customer_sojourn.empty()) return {};
  const double w = stats::mean(sim.per_customer_sojourn);
  const double wq = stats::mean(sim.per_customer_wait);
  return {std::abs(sim.time_avg_users - lambda * w), std::abs(sim.time_avg_queue - lambda * wq)};
}

stats::EstimateWithCI littles_law_residual_ci(const QueueSimResult& sim, double lambda,
                                              double level, bool queue_only) {
  require(sim.batches.size() >= 2, "littles_law_residual_ci: needs batch observations");
  std::vector<double> diffs;
  diffs.reserve(sim.batches.size());
  for (const auto& b : sim.batches)
    diffs.push_back(queue_only ? b.time_avg_queue - lambda * b.mean_wait
                               : b.time_avg_users - lambda * b.mean_sojourn);
  return stats::batch_ci(diffs, level);
}

stats::EstimateWithCI batch_estimate(const QueueSimResult& sim, double BatchObservation::*field,
                                     double level) {
  require(sim.batches.size() >= 2, "batch_estimate: needs batch observations");
  std::vector<double> values;
  values.reserve(sim.batches.size());
  for (const auto& b : sim.batches) values.push_back(b.*field);
  return stats::batch_ci(values, level);
}

std::vector<double> state_time_fractions(const QueueSimResult& sim, std::size_t max_state) {
  std::vector<double> fractions(max_state + 1, 0.0);
  const double length = sim.users_path.horizon;
  if (length <= 0.0) return fractions;
  const auto& path = sim.users_path;
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const double end = i + 1 < path.states.size() ? path.jump_times[i + 1] : length;
    fractions[std::min(path.states[i], max_state)] += end - path.jump_times[i];
  }
  for (double& f : fractions) f /= length;
  return fractions;
}

std::vector<double> state_counts_at_epochs(const QueueSimResult& sim, double spacing,
                                           std::size_t max_state) {
  require(spacing > 0.0, "state_counts_at_epochs: spacing must be > 0");
  std::vector<double> counts(max_state + 2, 0.0);
  for (double t = spacing; t <= sim.users_path.horizon; t += spacing)
    counts[std::min(markov::state_at(sim.users_path, t), max_state + 1)] += 1.0;
  return counts;
}

markov::Distribution transient_mm1(const MM1Params& params, std::size_t initial_users, double t,
                                   std::size_t n_max) {
  require(std::isfinite(params.lambda) && params.lambda > 0.0, "transient_mm1: lambda must be > 0");
  require(std::isfinite(params.mu) && params.mu >= 0.0, "transient_mm1: mu must be >= 0");
  require(initial_users < n_max, "transient_mm1: initial_users must be below n_max");
  if (params.mu > params.lambda) {
    const std::size_t bound = markov::truncation_level(params.lambda / params.mu);
    require(n_max >= bound, "transient_mm1: n_max below the truncation level " + std::to_string(bound));
  }
  const auto gen = markov::birth_death_generator(
      markov::BirthDeathRates::constant(params.lambda, params.mu, n_max));
  markov::Distribution p0(n_max + 1, 0.0);
  p0[initial_users] = 1.0;
  return markov::integrate_forward_law(gen, p0, t);
}

InventoryMetrics simulate_inventory(const InventoryPolicy& policy, double horizon, RngStream& rng) {
  laws::validate(policy.demand_interarrival);
  laws::validate(policy.lead_time);
  require(policy.reorder_point >= 0 && policy.reorder_point < policy.order_up_to,
          "inventory: requires 0 <= r < s");
  require(policy.initial_level >= 0 && policy.initial_level <= policy.order_up_to,
          "inventory: requires 0 <= initial_level <= s");
  require(std::isfinite(horizon) && horizon > 0.0, "inventory: horizon must be > 0");

  constexpr double never = std::numeric_limits<double>::infinity();
  InventoryMetrics m;
  std::int64_t level = policy.initial_level;
  m.min_level = m.max_level = level;
  m.level_path.horizon = horizon;
  m.level_path.jump_times.push_back(0.0);
  m.level_path.states.push_back(static_cast<std::size_t>(level));

  double now = 0.0;
  double area = 0.0;
  double empty_time = 0.0;
  double order_arrival = never;
  auto maybe_order = [&] {
    if (level <= policy.reorder_point && order_arrival == never) {
      order_arrival = now + non_negative_draw(policy.lead_time, rng);
      ++m.orders_placed;
    }
  };
  auto record = [&] {
    m.min_level = std::min(m.min_level, level);
    m.max_level = std::max(m.max_level, level);
    if (now == m.level_path.jump_times.back())
      m.level_path.states.back() = static_cast<std::size_t>(level);
    else {
      m.level_path.jump_times.push_back(now);
      m.level_path.states.push_back(static_cast<std::size_t>(level));
    }
  };
  maybe_order();
  double next_demand = non_negative_draw(policy.demand_interarrival, rng);

  while (true) {
    // Replenishment wins a tie with a demand.
    const bool order_next = order_arrival <= next_demand;
    const double t = std::min(order_next ? order_arrival : next_demand, horizon);
    area += static_cast<double>(level) * (t - now);
    if (level == 0) empty_time += t - now;
    now = t;
    if (now >= horizon) break;
    if (order_next) {
      level += policy.order_up_to - policy.reorder_point;
      order_arrival = never;
    } else {
      ++m.demands;
      if (level > 0)
        --level;
      else
        ++m.lost_sales;
      next_demand = now + non_negative_draw(policy.demand_interarrival, rng);
    }
    maybe_order();
    record();
  }
  m.average_level = area / horizon;
  m.stockout_fraction = empty_time / horizon;
  m.lost_sale_fraction = m.demands > 0 ? static_cast<double>(m.lost_sales) / static_cast<double>(m.demands) : 0.0;
  return m;
}

void write_events_csv(std::ostream& out, const std::vector<QueueEvent>& events) {
  out << "time,event_kind,state\n";
  for (const auto& e : events) {
    detail::write_number(out, e.time);
    out << ',' << to_string(e.kind) << ',' << e.state << '\n';
  }
}

}  // namespace workbench::queueing
