#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "workbench/rng.hpp"

namespace workbench::processes {

/// Arrival epochs of a counting process observed on (0, horizon].
struct ArrivalPath {
  double horizon = 0.0;
  std::vector<double> arrival_times;  // strictly increasing, in (0, horizon]
};

/// Simple random walk X_0 = 0, X_{n+1} = X_n + eps_n with eps_n = +-1.
struct LatticePath {
  std::vector<int> steps;
  std::vector<std::int64_t> values;  // values.size() == steps.size() + 1
};

struct WienerPath {
  std::vector<double> grid;  // strictly increasing, grid[0] == 0
  std::vector<double> values;
};

/// Arrival times as cumulative Exponential(lambda) interarrivals, stopped at
/// the horizon.
ArrivalPath simulate_poisson_process(double lambda, double horizon, RngStream& rng);

/// Number of arrivals in (a, b]. Requires 0 <= a <= b <= horizon.
std::size_t count_in_interval(const ArrivalPath& path, double a, double b);

/// Gaps between successive arrivals, the first measured from time 0.
std::vector<double> interarrival_times(const ArrivalPath& path);

LatticePath simulate_random_walk(std::size_t n_steps, RngStream& rng);

/// W^N_t = X_{floor(N t)} / sqrt(N).
double rescale_walk(const LatticePath& path, std::size_t scale, double t);

/// Independent Normal(0, dt) increments over the given grid.
WienerPath simulate_wiener(std::span<const double> grid, RngStream& rng);

/// Evenly spaced grid {0, t_end/steps, ..., t_end}.
std::vector<double> uniform_grid(double t_end, std::size_t steps);

// CSV export with a "time,value" header. Arrival paths are written as the
// right-continuous counting function: one row at t=0 and one per arrival.
void write_csv(std::ostream& out, const ArrivalPath& path);
void write_csv(std::ostream& out, const LatticePath& path);
void write_csv(std::ostream& out, const WienerPath& path);

}  // namespace workbench::processes
