#include "workbench/processes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "csv_detail.hpp"
#include "workbench/error.hpp"

namespace workbench::processes {

using detail::require;

ArrivalPath simulate_poisson_process(double lambda, double horizon, RngStream& rng) {
  require(std::isfinite(lambda) && lambda > 0.0, "poisson process: lambda must be > 0");
  require(std::isfinite(horizon) && horizon > 0.0, "poisson process: horizon must be > 0");
  ArrivalPath path;
  path.horizon = horizon;
  for (double t = rng.exponential(lambda); t <= horizon; t += rng.exponential(lambda)) {
    // Consecutive draws can coincide after rounding for huge rates; keep the
    // sequence strictly increasing.
    if (!path.arrival_times.empty() && t <= path.arrival_times.back()) continue;
    path.arrival_times.push_back(t);
  }
  return path;
}

std::size_t count_in_interval(const ArrivalPath& path, double a, double b) {
  require(a >= 0.0 && a <= b && b <= path.horizon,
          "count_in_interval: requires 0 <= a <= b <= horizon");
  const auto& t = path.arrival_times;
  const auto first = std::upper_bound(t.begin(), t.end(), a);
  const auto last = std::upper_bound(t.begin(), t.end(), b);
  return static_cast<std::size_t>(last - first);
}

std::vector<double> interarrival_times(const ArrivalPath& path) {
  std::vector<double> gaps;
  gaps.reserve(path.arrival_times.size());
  double previous = 0.0;
  for (double t : path.arrival_times) {
    gaps.push_back(t - previous);
    previous = t;
  }
  return gaps;
}

LatticePath simulate_random_walk(std::size_t n_steps, RngStream& rng) {
  require(n_steps >= 1, "random walk: n_steps must be >= 1");
  LatticePath path;
  path.steps.reserve(n_steps);
  path.values.reserve(n_steps + 1);
  path.values.push_back(0);
  // One random bit per step, consumed 64 at a time.
  std::uint64_t bits = 0;
  int available = 0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    if (available == 0) {
      bits = rng.next_u64();
      available = 64;
    }
    const int step = (bits & 1u) ? 1 : -1;
    bits >>= 1;
    --available;
    path.steps.push_back(step);
    path.values.push_back(path.values.back() + step);
  }
  return path;
}

double rescale_walk(const LatticePath& path, std::size_t scale, double t) {
  require(scale >= 1, "rescale_walk: N must be >= 1");
  require(t >= 0.0, "rescale_walk: t must be >= 0");
  const double index = std::floor(static_cast<double>(scale) * t);
  require(index <= static_cast<double>(path.steps.size()), "rescale_walk: path too short");
  return static_cast<double>(path.values[static_cast<std::size_t>(index)]) /
         std::sqrt(static_cast<double>(scale));
}

WienerPath simulate_wiener(std::span<const double> grid, RngStream& rng) {
  require(!grid.empty() && grid.front() == 0.0, "wiener: grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "wiener: grid must be strictly increasing");
  WienerPath path;
  path.grid.assign(grid.begin(), grid.end());
  path.values.resize(grid.size());
  path.values[0] = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    path.values[i] = path.values[i - 1] + std::sqrt(grid[i] - grid[i - 1]) * rng.standard_normal();
  return path;
}

std::vector<double> uniform_grid(double t_end, std::size_t steps) {
  require(t_end > 0.0 && steps >= 1, "uniform_grid: requires t_end > 0 and steps >= 1");
  std::vector<double> grid(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    grid[i] = t_end * static_cast<double>(i) / static_cast<double>(steps);
  return grid;
}

void write_csv(std::ostream& out, const ArrivalPath& path) {
  out << "time,value\n";
  detail::write_row(out, 0.0, 0.0);
  for (std::size_t i = 0; i < path.arrival_times.size(); ++i)
    detail::write_row(out, path.arrival_times[i], static_cast<double>(i + 1));
}

void write_csv(std::ostream& out, const LatticePath& path) {
  out << "time,value\n";
  for (std::size_t i = 0; i < path.values.size(); ++i)
    detail::write_row(out, static_cast<double>(i), static_cast<double>(path.values[i]));
}

void write_csv(std::ostream& out, const WienerPath& path) {
  out << "time,value\n";
  for (std::size_t i = 0; i < path.grid.size(); ++i)
    detail::write_row(out, path.grid[i], path.values[i]);
}

}  // namespace workbench::processes
