#include "workbench/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <utility>

#include "workbench/error.hpp"

namespace workbench::markov {
namespace {

using detail::require;

constexpr double kClipTolerance = 1e-12;

void check_distribution(std::span<const double> p, std::size_t size, const char* what) {
  require(p.size() == size, std::string(what) + ": distribution size does not match the chain");
  double sum = 0.0;
  for (double v : p) {
    require(std::isfinite(v) && v >= 0.0, std::string(what) + ": negative probability");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-9, std::string(what) + ": distribution must sum to 1");
}

void clip_and_renormalise(Distribution& p) {
  bool clipped = false;
  for (double& v : p) {
    if (v < 0.0) {
      if (v < -kClipTolerance)
        throw StabilityError("forward integration produced a negative probability " +
                             std::to_string(v));
      v = 0.0;
      clipped = true;
    }
  }
  if (clipped) {
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= sum;
  }
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(std::size_t size, std::span<const RateTriplet> rates)
    : rows_(size), exit_(size, 0.0) {
  require(size >= 1, "generator: size must be >= 1");
  std::vector<std::map<std::size_t, double>> merged(size);
  for (const auto& r : rates) {
    require(r.from < size && r.to < size, "generator: state index out of range");
    require(r.from != r.to, "generator: diagonal entries are implied, pass off-diagonal rates");
    require(std::isfinite(r.rate) && r.rate >= 0.0, "generator: rates must be >= 0");
    merged[r.from][r.to] += r.rate;
  }
  for (std::size_t n = 0; n < size; ++n) {
    for (const auto& [to, rate] : merged[n]) {
      if (rate == 0.0) continue;
      rows_[n].push_back({to, rate});
      exit_[n] += rate;
    }
    max_exit_ = std::max(max_exit_, exit_[n]);
  }
}

double GeneratorMatrix::operator()(std::size_t n, std::size_t m) const {
  if (n == m) return -exit_[n];
  for (const auto& e : rows_[n])
    if (e.to == m) return e.rate;
  return 0.0;
}

std::vector<RateTriplet> GeneratorMatrix::triplets() const {
  std::vector<RateTriplet> out;
  for (std::size_t n = 0; n < rows_.size(); ++n)
    for (const auto& e : rows_[n]) out.push_back({n, e.to, e.rate});
  return out;
}

void GeneratorMatrix::forward_rhs(std::span<const double> p, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const double mass = p[k];
    if (mass == 0.0) continue;
    out[k] -= exit_[k] * mass;
    for (const auto& e : rows_[k]) out[e.to] += mass * e.rate;
  }
}

Distribution GeneratorMatrix::forward_rhs(std::span<const double> p) const {
  Distribution out(size());
  forward_rhs(p, out);
  return out;
}

TransitionMatrix::TransitionMatrix(std::size_t size, std::vector<double> entries)
    : TransitionMatrix(size, std::move(entries), true) {}

TransitionMatrix::TransitionMatrix(std::size_t size, std::vector<double> entries, bool validate)
    : size_(size), entries_(std::move(entries)) {
  require(size >= 1, "transition matrix: size must be >= 1");
  require(entries_.size() == size * size, "transition matrix: expected size*size entries");
  if (!validate) return;
  for (std::size_t n = 0; n < size; ++n) {
    double sum = 0.0;
    for (std::size_t m = 0; m < size; ++m) {
      const double v = entries_[n * size + m];
      require(std::isfinite(v) && v >= 0.0, "transition matrix: entries must be >= 0");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-12,
            "transition matrix: row " + std::to_string(n) + " does not sum to 1");
  }
}

TransitionMatrix TransitionMatrix::identity(std::size_t size) {
  std::vector<double> e(size * size, 0.0);
  for (std::size_t n = 0; n < size; ++n) e[n * size + n] = 1.0;
  return TransitionMatrix(size, std::move(e), false);
}

TransitionMatrix TransitionMatrix::operator*(const TransitionMatrix& rhs) const {
  require(size_ == rhs.size_, "transition matrix product: size mismatch");
  std::vector<double> out(size_ * size_, 0.0);
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t k = 0; k < size_; ++k) {
      const double a = entries_[i * size_ + k];
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < size_; ++j) out[i * size_ + j] += a * rhs.entries_[k * size_ + j];
    }
  // Products of stochastic matrices are stochastic up to rounding; skip the
  // 1e-12 row check, which long products can graze.
  return TransitionMatrix(size_, std::move(out), false);
}

Distribution TransitionMatrix::left_multiply(std::span<const double> p) const {
  require(p.size() == size_, "left_multiply: size mismatch");
  Distribution out(size_, 0.0);
  for (std::size_t k = 0; k < size_; ++k) {
    const double mass = p[k];
    if (mass == 0.0) continue;
    const double* row_k = entries_.data() + k * size_;
    for (std::size_t m = 0; m < size_; ++m) out[m] += mass * row_k[m];
  }
  return out;
}

BirthDeathRates BirthDeathRates::constant(double lambda, double mu, std::size_t n_max) {
  return {std::vector<double>(n_max, lambda), std::vector<double>(n_max, mu)};
}

GeneratorMatrix birth_death_generator(const BirthDeathRates& rates) {
  const std::size_t n_max = rates.n_max();
  require(n_max >= 1, "birth-death: needs at least one birth rate (N_max >= 1)");
  require(rates.death.size() == n_max, "birth-death: need one death rate per state 1..N_max");
  std::vector<RateTriplet> triplets;
  triplets.reserve(2 * n_max);
  for (std::size_t n = 0; n < n_max; ++n) {
    require(std::isfinite(rates.birth[n]) && rates.birth[n] >= 0.0, "birth-death: birth rates must be >= 0");
    require(std::isfinite(rates.death[n]) && rates.death[n] >= 0.0, "birth-death: death rates must be >= 0");
    triplets.push_back({n, n + 1, rates.birth[n]});
    triplets.push_back({n + 1, n, rates.death[n]});
  }
  return GeneratorMatrix(n_max + 1, triplets);
}

std::size_t truncation_level(double rho, double tail) {
  require(rho > 0.0 && rho < 1.0, "truncation_level: requires 0 < rho < 1");
  require(tail > 0.0 && tail < 1.0, "truncation_level: requires 0 < tail < 1");
  return static_cast<std::size_t>(std::ceil(std::log(tail) / std::log(rho)));
}

double default_step(const GeneratorMatrix& gen) {
  return gen.max_exit_rate() > 0.0 ? 0.05 / gen.max_exit_rate() : 1.0;
}

Distribution integrate_forward_law(const GeneratorMatrix& gen, std::span<const double> p0,
                                   double t, double dt) {
  check_distribution(p0, gen.size(), "integrate_forward_law");
  require(std::isfinite(t) && t >= 0.0, "integrate_forward_law: t must be >= 0");
  require(std::isfinite(dt) && dt > 0.0, "integrate_forward_law: dt must be > 0");
  if (gen.max_exit_rate() > 0.0 && dt > 0.1 / gen.max_exit_rate())
    throw StabilityError("integrate_forward_law: dt exceeds the stability bound 0.1 / max q_n");
  Distribution p(p0.begin(), p0.end());
  if (t == 0.0) return p;

  const auto steps = static_cast<std::size_t>(std::ceil(t / dt));
  const double h = t / static_cast<double>(steps);
  const std::size_t n = gen.size();
  Distribution k1(n), k2(n), k3(n), k4(n), stage(n);
  for (std::size_t step = 0; step < steps; ++step) {
    gen.forward_rhs(p, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = p[i] + 0.5 * h * k1[i];
    gen.forward_rhs(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = p[i] + 0.5 * h * k2[i];
    gen.forward_rhs(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = p[i] + h * k3[i];
    gen.forward_rhs(stage, k4);
    for (std::size_t i = 0; i < n; ++i)
      p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  clip_and_renormalise(p);
  return p;
}

Distribution integrate_forward_law(const GeneratorMatrix& gen, std::span<const double> p0,
                                   double t) {
  return integrate_forward_law(gen, p0, t, default_step(gen));
}

TransitionMatrix transition_probabilities(const GeneratorMatrix& gen, double s, double t,
                                          double dt) {
  require(s <= t, "transition_probabilities: requires s <= t");
  const std::size_t n = gen.size();
  std::vector<double> entries(n * n);
  Distribution unit(n, 0.0);
  for (std::size_t row = 0; row < n; ++row) {
    unit.assign(n, 0.0);
    unit[row] = 1.0;
    const auto p = integrate_forward_law(gen, unit, t - s, dt);
    std::copy(p.begin(), p.end(), entries.begin() + static_cast<std::ptrdiff_t>(row * n));
  }
  return TransitionMatrix(n, std::move(entries));
}

double chapman_kolmogorov_defect(const GeneratorMatrix& gen, double u, double t, double s,
                                 double dt) {
  require(u <= t && t <= s, "chapman_kolmogorov_defect: requires u <= t <= s");
  const auto direct = transition_probabilities(gen, u, s, dt);
  const auto composed = transition_probabilities(gen, u, t, dt) * transition_probabilities(gen, t, s, dt);
  double defect = 0.0;
  for (std::size_t i = 0; i < direct.entries().size(); ++i)
    defect = std::max(defect, std::abs(direct.entries()[i] - composed.entries()[i]));
  return defect;
}

Distribution stationary_birth_death(const BirthDeathRates& rates) {
  const std::size_t n_max = rates.n_max();
  require(rates.death.size() == n_max, "stationary_birth_death: need one death rate per state");
  Distribution p(n_max + 1);
  p[0] = 1.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double up = rates.birth[n - 1];
    const double down = rates.death[n - 1];
    require(up >= 0.0 && down >= 0.0, "stationary_birth_death: rates must be >= 0");
    if (up == 0.0) {
      p[n] = 0.0;
    } else if (down == 0.0) {
      if (p[n - 1] > 0.0)
        throw DegenerateError("stationary_birth_death: state " + std::to_string(n) +
                              " cannot return downward, no product-form stationary law");
      p[n] = 0.0;
    } else {
      p[n] = p[n - 1] * up / down;
    }
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!std::isfinite(total) || total <= 0.0)
    throw DegenerateError("stationary_birth_death: masses are not normalisable");
  for (double& v : p) v /= total;
  return p;
}

StationaryResult dtmc_stationary(const TransitionMatrix& matrix, double tol,
                                 std::optional<Distribution> p0, std::size_t max_iterations) {
  require(tol > 0.0, "dtmc_stationary: tol must be > 0");
  const std::size_t n = matrix.size();
  Distribution p = p0 ? *p0 : Distribution(n, 1.0 / static_cast<double>(n));
  check_distribution(p, n, "dtmc_stationary");

  StationaryResult result;
  const auto classes = communicating_classes(matrix);
  const auto labels = classify_states(matrix);
  std::vector<bool> closed_class_seen(n, false);
  std::size_t closed = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (labels[s] != StateClass::transient && !closed_class_seen[classes[s]]) {
      closed_class_seen[classes[s]] = true;
      ++closed;
    }
  }
  result.unique = closed <= 1;

  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    Distribution next = matrix.left_multiply(p);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(next[i] - p[i]));
    p = std::move(next);
    if (diff < tol) {
      result.distribution = std::move(p);
      result.iterations = iter;
      return result;
    }
  }
  throw ConvergenceError("dtmc_stationary: power iteration did not converge within " +
                         std::to_string(max_iterations) +
                         " iterations (periodic or slowly mixing chain)");
}

const char* to_string(StateClass c) {
  switch (c) {
    case StateClass::absorbing:
      return "absorbing";
    case StateClass::recurrent:
      return "recurrent";
    case StateClass::transient:
      return "transient";
  }
  return "unknown";
}

std::vector<std::size_t> communicating_classes(const TransitionMatrix& matrix) {
  // Iterative Tarjan.
  const std::size_t n = matrix.size();
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unvisited), low(n, 0), component(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next neighbour)
  std::size_t counter = 0;
  std::size_t components = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      bool descended = false;
      while (next < n) {
        const std::size_t w = next++;
        if (w == v || matrix(v, w) <= 0.0) continue;
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      const std::size_t finished = v;
      if (low[finished] == index[finished]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component[w] = components;
        } while (w != finished);
        ++components;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return component;
}

std::vector<StateClass> classify_states(const TransitionMatrix& matrix) {
  const std::size_t n = matrix.size();
  const auto component = communicating_classes(matrix);
  const std::size_t count = n == 0 ? 0 : *std::max_element(component.begin(), component.end()) + 1;
  std::vector<bool> closed(count, true);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w)
      if (matrix(v, w) > 0.0 && component[v] != component[w]) closed[component[v]] = false;
  std::vector<StateClass> labels(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (matrix(v, v) >= 1.0 - 1e-12)
      labels[v] = StateClass::absorbing;
    else
      labels[v] = closed[component[v]] ? StateClass::recurrent : StateClass::transient;
  }
  return labels;
}

StatePath simulate_ctmc(const GeneratorMatrix& gen, std::size_t start, double horizon,
                        RngStream& rng) {
  require(start < gen.size(), "simulate_ctmc: start state out of range");
  require(std::isfinite(horizon) && horizon >= 0.0, "simulate_ctmc: horizon must be >= 0");
  StatePath path;
  path.horizon = horizon;
  path.jump_times.push_back(0.0);
  path.states.push_back(start);
  double t = 0.0;
  std::size_t state = start;
  while (true) {
    const double q = gen.exit_rate(state);
    if (q == 0.0) break;
    t += rng.exponential(q);
    if (t > horizon) break;
    double u = rng.uniform() * q;
    const auto row = gen.row(state);
    std::size_t next = row.back().to;
    for (const auto& e : row) {
      if (u < e.rate) {
        next = e.to;
        break;
      }
      u -= e.rate;
    }
    state = next;
    path.jump_times.push_back(t);
    path.states.push_back(state);
  }
  return path;
}

std::vector<double> occupation_times(const StatePath& path, double horizon, std::size_t size) {
  require(horizon >= 0.0 && horizon <= path.horizon + 1e-12,
          "occupation_times: horizon beyond the simulated path");
  std::vector<double> time(size, 0.0);
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const double begin = path.jump_times[i];
    if (begin >= horizon) break;
    const double end = i + 1 < path.states.size() ? std::min(path.jump_times[i + 1], horizon) : horizon;
    require(path.states[i] < size, "occupation_times: state exceeds size");
    time[path.states[i]] += end - begin;
  }
  return time;
}

double ergodic_time_average(const StatePath& path, double horizon) {
  require(horizon > 0.0 && horizon <= path.horizon + 1e-12,
          "ergodic_time_average: horizon must lie in (0, path horizon]");
  double integral = 0.0;
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const double begin = path.jump_times[i];
    if (begin >= horizon) break;
    const double end = i + 1 < path.states.size() ? std::min(path.jump_times[i + 1], horizon) : horizon;
    integral += static_cast<double>(path.states[i]) * (end - begin);
  }
  return integral / horizon;
}

std::size_t state_at(const StatePath& path, double t) {
  require(!path.states.empty(), "state_at: empty path");
  const auto it = std::upper_bound(path.jump_times.begin(), path.jump_times.end(), t);
  if (it == path.jump_times.begin()) return path.states.front();
  return path.states[static_cast<std::size_t>(it - path.jump_times.begin()) - 1];
}

nlohmann::json to_json(const GeneratorMatrix& gen) {
  nlohmann::json rates = nlohmann::json::array();
  for (const auto& t : gen.triplets()) rates.push_back({t.from, t.to, t.rate});
  return {{"size", gen.size()}, {"rates", rates}};
}

GeneratorMatrix generator_from_json(const nlohmann::json& doc) {
  require(doc.is_object() && doc.contains("size") && doc.contains("rates"),
          "generator JSON: expected {\"size\", \"rates\"}");
  const auto size = doc.at("size").get<std::size_t>();
  std::vector<RateTriplet> triplets;
  for (const auto& entry : doc.at("rates")) {
    require(entry.is_array() && entry.size() == 3, "generator JSON: rates are [from, to, rate]");
    triplets.push_back({entry[0].get<std::size_t>(), entry[1].get<std::size_t>(), entry[2].get<double>()});
  }
  return GeneratorMatrix(size, triplets);
}

nlohmann::json to_json(const TransitionMatrix& matrix) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t n = 0; n < matrix.size(); ++n)
    for (std::size_t m = 0; m < matrix.size(); ++m)
      if (matrix(n, m) != 0.0) entries.push_back({n, m, matrix(n, m)});
  return {{"size", matrix.size()}, {"entries", entries}};
}

TransitionMatrix transition_matrix_from_json(const nlohmann::json& doc) {
  require(doc.is_object() && doc.contains("size") && doc.contains("entries"),
          "transition matrix JSON: expected {\"size\", \"entries\"}");
  const auto size = doc.at("size").get<std::size_t>();
  require(size >= 1 && size <= 100000, "transition matrix JSON: bad size");
  std::vector<double> dense(size * size, 0.0);
  for (const auto& entry : doc.at("entries")) {
    require(entry.is_array() && entry.size() == 3, "transition matrix JSON: entries are [from, to, p]");
    const auto n = entry[0].get<std::size_t>();
    const auto m = entry[1].get<std::size_t>();
    require(n < size && m < size, "transition matrix JSON: index out of range");
    dense[n * size + m] += entry[2].get<double>();
  }
  return TransitionMatrix(size, std::move(dense));
}

nlohmann::json distribution_to_json(std::span<const double> p) {
  return {{"size", p.size()}, {"probabilities", std::vector<double>(p.begin(), p.end())}};
}

Distribution distribution_from_json(const nlohmann::json& doc) {
  require(doc.is_object() && doc.contains("probabilities"), "distribution JSON: expected \"probabilities\"");
  auto p = doc.at("probabilities").get<Distribution>();
  if (doc.contains("size"))
    require(doc.at("size").get<std::size_t>() == p.size(), "distribution JSON: size mismatch");
  check_distribution(p, p.size(), "distribution JSON");
  return p;
}

}  // namespace workbench::markov
