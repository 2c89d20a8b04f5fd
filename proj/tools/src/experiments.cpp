#include "workbench_tools/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "workbench/error.hpp"
#include "workbench/finance.hpp"
#include "workbench/genetics.hpp"
#include "workbench/laws.hpp"
#include "workbench/markov.hpp"
#include "workbench/parallel.hpp"
#include "workbench/processes.hpp"
#include "workbench/queueing.hpp"
#include "workbench/rng.hpp"
#include "workbench/stats.hpp"

namespace workbench::tools {
namespace {

using nlohmann::json;

constexpr std::uint64_t kMaxReplications = 10'000'000;

// Parameter access ----------------------------------------------------------

class Params {
 public:
  Params(const ExperimentInfo& info, const std::map<std::string, std::string>& given)
      : experiment_(info.name), echo_(json::object()) {
    for (const auto& spec : info.params) specs_[spec.name] = &spec;
    for (const auto& entry : given)
      if (!specs_.contains(entry.first))
        throw DomainError(experiment_ + ": unknown parameter '" + entry.first + "'");
    for (const auto& spec : info.params) {
      const auto it = given.find(spec.name);
      const std::string value = it != given.end() ? it->second : spec.default_value;
      if (value.empty()) {
        if (spec.required) throw DomainError(experiment_ + ": missing required parameter --" + spec.name);
        continue;
      }
      values_[spec.name] = value;
      switch (spec.type) {
        case ParamType::real:
          echo_[spec.name] = parse_real(spec.name, value);
          break;
        case ParamType::integer:
          echo_[spec.name] = parse_integer(spec.name, value);
          break;
        case ParamType::choice:
          if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end())
            throw DomainError(experiment_ + ": --" + spec.name + " must be one of " + join(spec.choices));
          echo_[spec.name] = value;
          break;
        case ParamType::text:
          echo_[spec.name] = value;
          break;
      }
    }
  }

  bool has(const std::string& name) const { return values_.contains(name); }

  double real(const std::string& name) const { return parse_real(name, value(name)); }

  std::int64_t integer(const std::string& name) const { return parse_integer(name, value(name)); }

  std::size_t count(const std::string& name, std::int64_t minimum = 0) const {
    const auto v = integer(name);
    if (v < minimum)
      throw DomainError(experiment_ + ": --" + name + " must be >= " + std::to_string(minimum));
    return static_cast<std::size_t>(v);
  }

  const std::string& text(const std::string& name) const { return value(name); }

  std::optional<double> maybe_real(const std::string& name) const {
    return has(name) ? std::optional<double>(real(name)) : std::nullopt;
  }

  const json& echo() const { return echo_; }
  const std::string& experiment() const { return experiment_; }

 private:
  const std::string& value(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) throw DomainError(experiment_ + ": missing parameter --" + name);
    return it->second;
  }

  double parse_real(const std::string& name, const std::string& text) const {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
      throw DomainError(experiment_ + ": --" + name + " expects a real number, got '" + text + "'");
    return v;
  }

  std::int64_t parse_integer(const std::string& name, const std::string& text) const {
    std::int64_t v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
      throw DomainError(experiment_ + ": --" + name + " expects an integer, got '" + text + "'");
    return v;
  }

  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& i : items) out += (out.empty() ? "" : "|") + i;
    return out;
  }

  std::string experiment_;
  std::map<std::string, const ParamSpec*> specs_;
  std::map<std::string, std::string> values_;
  json echo_;
};

struct Context {
  const Params& p;
  std::uint64_t seed = 0;
  std::size_t replications = 1;
  bool want_csv = false;
};

struct Outcome {
  json results = json::object();
  json oracle = json::object();
  std::optional<std::string> csv;
};

using Runner = std::function<Outcome(const Context&)>;

struct Entry {
  ExperimentInfo info;
  Runner run;
};

// Small helpers -------------------------------------------------------------

json ci_json(const stats::EstimateWithCI& e) {
  return {{"mean", e.mean}, {"half_width", e.half_width}, {"low", e.low()},
          {"high", e.high()}, {"level", e.level},         {"n", e.n}};
}

json check_json(double expected, const stats::EstimateWithCI& e) {
  return {{"expected", expected}, {"covered", e.covers(expected)}};
}

json ks_json(const stats::KsResult& r) {
  return {{"statistic", r.statistic}, {"critical_value", r.critical_value},
          {"alpha", r.alpha},         {"n", r.n},
          {"passed", r.passed}};
}

json chi_json(const stats::ChiSquareResult& r) {
  return {{"statistic", r.statistic}, {"critical_value", r.critical_value},
          {"dof", r.dof},             {"alpha", r.alpha},
          {"passed", r.passed}};
}

template <typename T>
std::string to_csv(const T& path) {
  std::ostringstream out;
  processes::write_csv(out, path);
  return out.str();
}

std::string state_path_csv(const markov::StatePath& path) {
  std::ostringstream out;
  out << "time,value\n";
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    out << json(path.jump_times[i]).dump() << ',' << path.states[i] << '\n';
  }
  return out.str();
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Runs fn(rng, index) for every replication on stream (seed, index).
template <typename Fn>
auto replicate(const Context& c, Fn&& fn) {
  return parallel_map(c.replications, [&](std::size_t i) {
    RngStream rng(c.seed, i);
    return fn(rng, i);
  });
}

ParamSpec real_param(std::string name, std::string def, std::string help) {
  return {std::move(name), ParamType::real, std::move(def), std::move(help), {}, false};
}
ParamSpec int_param(std::string name, std::string def, std::string help) {
  return {std::move(name), ParamType::integer, std::move(def), std::move(help), {}, false};
}
ParamSpec text_param(std::string name, std::string help) {
  return {std::move(name), ParamType::text, "", std::move(help), {}, false};
}
ParamSpec choice_param(std::string name, std::string def, std::vector<std::string> choices,
                       std::string help) {
  return {std::move(name), ParamType::choice, std::move(def), std::move(help), std::move(choices), false};
}
ParamSpec required(ParamSpec spec) {
  spec.required = true;
  spec.default_value.clear();
  return spec;
}

// laws ----------------------------------------------------------------------

laws::DiscreteLaw discrete_law(const Params& p) {
  const auto& kind = p.text("law");
  if (kind == "binomial") return laws::Binomial{p.integer("n"), p.real("p")};
  if (kind == "geometric") return laws::Geometric{p.real("p")};
  if (kind == "poisson") return laws::Poisson{p.real("lambda")};
  return laws::FiniteUniform{p.integer("size")};
}

std::vector<ParamSpec> discrete_law_params(std::vector<std::string> extra_kinds = {}) {
  std::vector<std::string> kinds{"binomial", "geometric", "poisson", "uniform"};
  kinds.insert(kinds.end(), extra_kinds.begin(), extra_kinds.end());
  return {choice_param("law", "binomial", kinds, "law family"),
          int_param("n", "10", "binomial trial count"),
          real_param("p", "0.5", "binomial or geometric success probability"),
          real_param("lambda", "1", "Poisson mean or exponential rate"),
          int_param("size", "6", "outcome count of the finite uniform law on 1..size")};
}

Outcome laws_pmf(const Context& c) {
  const auto law = discrete_law(c.p);
  laws::validate(law);
  std::int64_t k_max = 0;
  if (c.p.has("k_max")) {
    k_max = c.p.integer("k_max");
    detail::require(k_max >= 0 && k_max <= 1'000'000, "laws pmf: --k_max must lie in 0..1e6");
  } else if (laws::support_max(law) >= 0) {
    k_max = laws::support_max(law);
  } else {
    while (laws::tail(law, k_max) >= 1e-12 && k_max < 1'000'000) ++k_max;
  }
  json pmf = json::array(), cdf = json::array(), tail = json::array();
  double mass = 0.0;
  for (std::int64_t k = 0; k <= k_max; ++k) {
    const double v = laws::pmf(law, k);
    mass += v;
    pmf.push_back(v);
    cdf.push_back(laws::cdf(law, k));
    tail.push_back(laws::tail(law, k));
  }
  const auto m = laws::moments(law);
  Outcome out;
  out.results = {{"k_max", k_max}, {"pmf", pmf}, {"cdf", cdf}, {"tail", tail},
                 {"mean", m.mean}, {"variance", m.variance}};
  out.oracle = {{"mass_defect", std::abs(mass + laws::tail(law, k_max) - 1.0)}};
  return out;
}

Outcome laws_sample(const Context& c) {
  const auto& kind = c.p.text("law");
  const bool continuous = kind == "exponential" || kind == "normal" || kind == "interval";
  const std::size_t count = c.p.count("count", 1);
  std::optional<laws::DiscreteLaw> discrete;
  std::optional<laws::ContinuousLaw> cont;
  if (kind == "exponential")
    cont = laws::Exponential{c.p.real("lambda")};
  else if (kind == "normal")
    cont = laws::Normal{c.p.real("mu"), c.p.real("sigma2")};
  else if (kind == "interval")
    cont = laws::Uniform{c.p.real("a"), c.p.real("b")};
  else
    discrete = discrete_law(c.p);
  if (cont) laws::validate(*cont);
  if (discrete) laws::validate(*discrete);
  const auto m = continuous ? laws::moments(*cont) : laws::moments(*discrete);

  const auto runs = replicate(c, [&](RngStream& rng, std::size_t) {
    const auto draws = continuous ? laws::sample(*cont, rng, count) : laws::sample(*discrete, rng, count);
    json run = {{"first_draws", std::vector<double>(draws.begin(), draws.begin() + std::min<std::size_t>(10, count))}};
    if (count >= 2) {
      const auto ci = stats::mean_ci(draws, 0.99);
      run["mean"] = ci_json(ci);
      run["variance"] = stats::sample_variance(draws);
      run["mean_check"] = check_json(m.mean, ci);
    }
    if (continuous && count >= 10) {
      run["ks"] = ks_json(stats::ks_statistic(draws, [&](double x) { return laws::cdf(*cont, x); }));
    } else if (!continuous) {
      const auto top = laws::support_max(*discrete);
      std::size_t k_max = top >= 0 ? static_cast<std::size_t>(top) : 0;
      if (top < 0)
        while (laws::tail(*discrete, static_cast<std::int64_t>(k_max)) * static_cast<double>(count) >= 1e-3) ++k_max;
      try {
        run["chi_square"] = chi_json(stats::chi_square_statistic(
            stats::histogram(draws, k_max), laws::pmf_table(*discrete, static_cast<std::int64_t>(k_max)),
            static_cast<double>(count)));
      } catch (const DomainError&) {
        run["chi_square"] = nullptr;  // too few draws to form two bins
      }
    }
    return run;
  });
  Outcome out;
  out.results = {{"count", count}, {"runs", runs}};
  out.oracle = {{"mean", m.mean}, {"variance", m.variance}};
  return out;
}

// processes -----------------------------------------------------------------

Outcome process_poisson(const Context& c) {
  const double lambda = c.p.real("lambda");
  const double horizon = c.p.real("horizon");
  struct Run {
    json summary;
    double count = 0.0;
    std::optional<processes::ArrivalPath> path;
  };
  const auto runs = replicate(c, [&](RngStream& rng, std::size_t i) {
    auto path = processes::simulate_poisson_process(lambda, horizon, rng);
    Run r;
    r.count = static_cast<double>(path.arrival_times.size());
    r.summary = {{"arrivals", path.arrival_times.size()}, {"rate", r.count / horizon}};
    if (path.arrival_times.size() >= 10) {
      const auto gaps = processes::interarrival_times(path);
      r.summary["interarrival_ks"] = ks_json(stats::ks_statistic(
          gaps, [&](double x) { return laws::cdf(laws::Exponential{lambda}, x); }));
    }
    if (i == 0) {
      if (path.arrival_times.size() <= 10000) r.summary["arrival_times"] = path.arrival_times;
      r.path = std::move(path);
    }
    return r;
  });
  Outcome out;
  json list = json::array();
  std::vector<double> counts;
  for (const auto& r : runs) {
    list.push_back(r.summary);
    counts.push_back(r.count);
  }
  out.results["runs"] = list;
  out.oracle["expected_count"] = lambda * horizon;
  if (counts.size() >= 2) {
    const auto ci = stats::mean_ci(counts, 0.99);
    out.results["count"] = ci_json(ci);
    out.oracle["count_check"] = check_json(lambda * horizon, ci);
  }
  if (counts.size() >= 100) {
    const laws::Poisson law{lambda * horizon};
    std::int64_t k_max = 0;
    while (laws::tail(law, k_max) * static_cast<double>(counts.size()) >= 1e-3) ++k_max;
    try {
      out.oracle["count_chi_square"] = chi_json(stats::chi_square_statistic(
          stats::histogram(counts, static_cast<std::size_t>(k_max)), laws::pmf_table(law, k_max),
          static_cast<double>(counts.size())));
    } catch (const DomainError&) {
      out.oracle["count_chi_square"] = nullptr;
    }
  }
  if (c.want_csv) out.csv = to_csv(*runs.front().path);
  return out;
}

Outcome process_walk(const Context& c) {
  const std::size_t steps = c.p.count("steps", 1);
  const std::size_t scale = c.p.has("scale") ? c.p.count("scale", 1) : steps;
  const double t = c.p.real("t");
  struct Run {
    double end = 0.0, rescaled = 0.0;
    std::optional<processes::LatticePath> path;
  };
  const auto runs = replicate(c, [&](RngStream& rng, std::size_t i) {
    auto path = processes::simulate_random_walk(steps, rng);
    Run r{static_cast<double>(path.values.back()), processes::rescale_walk(path, scale, t), {}};
    if (i == 0) r.path = std::move(path);
    return r;
  });
  std::vector<double> ends, rescaled;
  json list = json::array();
  for (const auto& r : runs) {
    ends.push_back(r.end);
    rescaled.push_back(r.rescaled);
    list.push_back({{"endpoint", r.end}, {"rescaled", r.rescaled}});
  }
  Outcome out;
  out.results["runs"] = list;
  out.oracle = {{"endpoint_mean", 0.0}, {"endpoint_variance", static_cast<double>(steps)}};
  if (ends.size() >= 2) {
    const auto ci = stats::mean_ci(ends, 0.99);
    out.results["endpoint"] = ci_json(ci);
    out.results["endpoint_variance"] = stats::sample_variance(ends);
    out.oracle["endpoint_check"] = check_json(0.0, ci);
  }
  if (rescaled.size() >= 10) {
    const double sd = std::sqrt(std::floor(static_cast<double>(scale) * t) / static_cast<double>(scale));
    if (sd > 0.0)
      out.oracle["rescaled_ks"] = ks_json(stats::ks_statistic(
          rescaled, [&](double x) { return laws::standard_normal_cdf(x / sd); }));
  }
  if (c.want_csv) out.csv = to_csv(*runs.front().path);
  return out;
}

Outcome process_wiener(const Context& c) {
  const double t_end = c.p.real("t_end");
  const std::size_t steps = c.p.count("steps", 1);
  detail::require(t_end > 0.0, "process wiener: --t_end must be > 0");
  const auto grid = processes::uniform_grid(t_end, steps);
  struct Run {
    double final_value = 0.0;
    std::optional<processes::WienerPath> path;
  };
  const auto runs = replicate(c, [&](RngStream& rng, std::size_t i) {
    auto path = processes::simulate_wiener(grid, rng);
    Run r{path.values.back(), {}};
    if (i == 0) r.path = std::move(path);
    return r;
  });
  std::vector<double> finals;
  json list = json::array();
  for (const auto& r : runs) {
    finals.push_back(r.final_value);
    list.push_back({{"final", r.final_value}});
  }
  Outcome out;
  out.results["runs"] = list;
  out.oracle = {{"final_mean", 0.0}, {"final_variance", t_end}};
  if (finals.size() >= 2) {
    const auto ci = stats::mean_ci(finals, 0.99);
    out.results["final"] = ci_json(ci);
    out.results["final_variance"] = stats::sample_variance(finals);
    out.oracle["final_check"] = check_json(0.0, ci);
  }
  if (c.want_csv) out.csv = to_csv(*runs.front().path);
  return out;
}

// markov --------------------------------------------------------------------

std::size_t birth_death_truncation(const Params& p, const std::string& who) {
  if (p.has("n_max")) return p.count("n_max", 1);
  const double lambda = p.real("lambda"), mu = p.real("mu");
  if (lambda > 0.0 && lambda < mu) return markov::truncation_level(lambda / mu);
  throw DomainError(who + ": --n_max is required unless lambda < mu");
}

Outcome markov_transient(const Context& c) {
  const double t = c.p.real("t");
  std::optional<markov::GeneratorMatrix> gen;
  std::optional<markov::BirthDeathRates> rates;
  if (c.p.has("generator")) {
    gen = markov::generator_from_json(read_json_file(c.p.text("generator")));
  } else {
    rates = markov::BirthDeathRates::constant(c.p.real("lambda"), c.p.real("mu"),
                                              birth_death_truncation(c.p, "markov transient"));
    gen = markov::birth_death_generator(*rates);
  }
  const auto initial = c.p.count("initial");
  detail::require(initial < gen->size(), "markov transient: --initial must be a state of the chain");
  markov::Distribution p0(gen->size(), 0.0);
  p0[initial] = 1.0;
  const double dt = c.p.has("dt") ? c.p.real("dt") : markov::default_step(*gen);
  const auto p = markov::integrate_forward_law(*gen, p0, t, dt);
  double mass = 0.0, mean = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    mass += p[n];
    mean += static_cast<double>(n) * p[n];
  }
  Outcome out;
  out.results = {{"states", gen->size()}, {"t", t}, {"dt", dt}, {"distribution", p},
                 {"mass", mass}, {"mean_state", mean}};
  out.oracle["mass_defect"] = std::abs(mass - 1.0);
  if (rates) {
    try {
      const auto stationary = markov::stationary_birth_death(*rates);
      double d = 0.0;
      for (std::size_t n = 0; n < p.size(); ++n) d = std::max(d, std::abs(p[n] - stationary[n]));
      out.oracle["stationary_distance"] = d;
    } catch (const DegenerateError&) {
    }
  }
  return out;
}

Outcome markov_stationary(const Context& c) {
  Outcome out;
  if (c.p.has("matrix")) {
    const auto matrix = markov::transition_matrix_from_json(read_json_file(c.p.text("matrix")));
    const auto r = markov::dtmc_stationary(matrix, c.p.real("tol"));
    const auto next = matrix.left_multiply(r.distribution);
    double residual = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      residual = std::max(residual, std::abs(next[i] - r.distribution[i]));
    out.results = {{"distribution", r.distribution}, {"iterations", r.iterations}, {"unique", r.unique}};
    out.oracle["fixed_point_residual"] = residual;
    return out;
  }
  const auto rates = markov::BirthDeathRates::constant(c.p.real("lambda"), c.p.real("mu"),
                                                       birth_death_truncation(c.p, "markov stationary"));
  const auto p = markov::stationary_birth_death(rates);
  const auto rhs = markov::birth_death_generator(rates).forward_rhs(p);
  out.results = {{"distribution", p}, {"unique", true}};
  out.oracle["forward_rhs_norm"] = max_abs(rhs);
  return out;
}

Outcome markov_classify(const Context& c) {
  const auto matrix = c.p.has("matrix")
                          ? markov::transition_matrix_from_json(read_json_file(c.p.text("matrix")))
                          : genetics::wf_transition_matrix(genetics::WrightFisherModel(c.p.integer("two_n")));
  const auto classes = markov::classify_states(matrix);
  json labels = json::array();
  std::map<std::string, std::size_t> counts;
  for (auto s : classes) {
    labels.push_back(markov::to_string(s));
    ++counts[markov::to_string(s)];
  }
  Outcome out;
  out.results = {{"states", labels}, {"classes", markov::communicating_classes(matrix)}, {"counts", counts}};
  return out;
}

// queueing ------------------------------------------------------------------

Outcome queue_analyze(const Context& c) {
  const queueing::MM1Params params{c.p.real("lambda"), c.p.real("mu")};
  const auto a = queueing::analyze_mm1(params, c.p.real("truncation_tail"));
  Outcome out;
  out.results = {{"rho", a.rho},
                 {"p0", a.p.front()},
                 {"e_n", a.expected_users},
                 {"e_nq", a.expected_queue},
                 {"e_tq", a.expected_wait},
                 {"e_t", a.expected_sojourn},
                 {"zero_wait_probability", queueing::waiting_time_cdf(params, 0.0)},
                 {"p", a.p}};
  out.oracle = {{"littles_law_users", std::abs(a.expected_users - params.lambda * a.expected_sojourn)},
                {"littles_law_queue", std::abs(a.expected_queue - params.lambda * a.expected_wait)}};
  return out;
}

Outcome queue_simulate(const Context& c) {
  const queueing::MM1Params params{c.p.real("lambda"), c.p.real("mu")};
  const std::size_t customers = c.p.count("customers", 1);
  const double level = c.p.real("level");
  queueing::SimulationOptions options;
  options.warmup_fraction = c.p.real("warmup");
  options.batches = c.p.count("batches", 2);
  std::optional<queueing::MM1Analysis> analytic;
  if (params.lambda > 0.0 && params.lambda < params.mu) analytic = queueing::analyze_mm1(params);

  struct Run {
    json summary;
    std::optional<std::string> events_csv;
  };
  const auto runs = replicate(c, [&](RngStream& rng, std::size_t i) {
    auto opt = options;
    opt.record_events = c.want_csv && i == 0;
    const auto sim = queueing::simulate_mm1(params, customers, rng, opt);
    using B = queueing::BatchObservation;
    const auto e_n = queueing::batch_estimate(sim, &B::time_avg_users, level);
    const auto e_nq = queueing::batch_estimate(sim, &B::time_avg_queue, level);
    const auto e_tq = queueing::batch_estimate(sim, &B::mean_wait, level);
    const auto e_t = queueing::batch_estimate(sim, &B::mean_sojourn, level);
    const auto busy = queueing::batch_estimate(sim, &B::busy_fraction, level);
    const auto zero = queueing::batch_estimate(sim, &B::zero_wait_fraction, level);
    const auto little = queueing::littles_law_residual_ci(sim, params.lambda, level);
    const auto little_q = queueing::littles_law_residual_ci(sim, params.lambda, level, true);
    Run r;
    r.summary = {{"completed", sim.completed},
                 {"e_n", ci_json(e_n)},
                 {"e_nq", ci_json(e_nq)},
                 {"e_tq", ci_json(e_tq)},
                 {"e_t", ci_json(e_t)},
                 {"utilization", ci_json(busy)},
                 {"zero_wait_fraction", ci_json(zero)},
                 {"littles_residual", ci_json(little)},
                 {"littles_residual_queue", ci_json(little_q)}};
    json covers = {{"littles_residual", little.covers(0.0)}, {"littles_residual_queue", little_q.covers(0.0)}};
    if (analytic) {
      covers["e_n"] = e_n.covers(analytic->expected_users);
      covers["e_nq"] = e_nq.covers(analytic->expected_queue);
      covers["e_tq"] = e_tq.covers(analytic->expected_wait);
      covers["e_t"] = e_t.covers(analytic->expected_sojourn);
      covers["utilization"] = busy.covers(analytic->rho);
      covers["zero_wait_fraction"] = zero.covers(1.0 - analytic->rho);
    }
    r.summary["covers"] = covers;
    if (opt.record_events) {
      std::ostringstream csv;
      queueing::write_events_csv(csv, sim.events);
      r.events_csv = csv.str();
    }
    return r;
  });
  Outcome out;
  json list = json::array();
  for (const auto& r : runs) list.push_back(r.summary);
  out.results = {{"customers", customers}, {"runs", list}};
  if (analytic) {
    out.oracle = {{"rho", analytic->rho},
                  {"e_n", analytic->expected_users},
                  {"e_nq", analytic->expected_queue},
                  {"e_tq", analytic->expected_wait},
                  {"e_t", analytic->expected_sojourn},
                  {"zero_wait_fraction", 1.0 - analytic->rho}};
  }
  if (c.want_csv) out.csv = runs.front().events_csv;
  return out;
}

Outcome queue_transient(const Context& c) {
  const queueing::MM1Params params{c.p.real("lambda"), c.p.real("mu")};
  const std::size_t n_max = birth_death_truncation(c.p, "queue transient");
  const double t = c.p.real("t");
  const auto p = queueing::transient_mm1(params, c.p.count("initial"), t, n_max);
  double mass = 0.0, mean = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    mass += p[n];
    mean += static_cast<double>(n) * p[n];
  }
  Outcome out;
  out.results = {{"n_max", n_max}, {"t", t}, {"distribution", p}, {"mass", mass}, {"mean_users", mean}};
  if (params.lambda < params.mu) {
    const double rho = params.lambda / params.mu;
    double d = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n)
      d = std::max(d, std::abs(p[n] - std::pow(rho, static_cast<double>(n)) * (1.0 - rho)));
    out.oracle["steady_state_distance"] = d;
  }
  return out;
}

Outcome queue_inventory(const Context& c) {
  queueing::InventoryPolicy policy;
  policy.reorder_point = c.p.integer("r");
  policy.order_up_to = c.p.integer("s");
  policy.initial_level = c.p.has("initial") ? c.p.integer("initial") : policy.order_up_to;
  policy.demand_interarrival = laws::Exponential{c.p.real("demand_rate")};
  policy.lead_time = laws::Exponential{c.p.real("lead_rate")};
  const double horizon = c.p.real("horizon");
  struct Run {
    json summary;
    double lost = 0.0, stockout = 0.0, level = 0.0;
    std::optional<std::string> csv;
  };
  const auto runs = replicate(c, [&](RngStream& rng, std::size_t i) {
    const auto m = queueing::simulate_inventory(policy, horizon, rng);
    Run r;
    r.lost = m.lost_sale_fraction;
    r.stockout = m.stockout_fraction;
    r.level = m.average_level;
    r.summary = {{"average_level", m.average_level}, {"stockout_fraction", m.stockout_fraction},
                 {"demands", m.demands},             {"lost_sales", m.lost_sales},
                 {"lost_sale_fraction", m.lost_sale_fraction},
                 {"orders_placed", m.orders_placed}, {"min_level", m.min_level},
                 {"max_level", m.max_level}};
    if (c.want_csv && i == 0) r.csv = state_path_csv(m.level_path);
    return r;
  });
  Outcome out;
  json list = json::array();
  std::vector<double> lost, stockout, level;
  for (const auto& r : runs) {
    list.push_back(r.summary);
    lost.push_back(r.lost);
    stockout.push_back(r.stockout);
    level.push_back(r.level);
  }
  out.results["runs"] = list;
  if (runs.size() >= 2) {
    out.results["lost_sale_fraction"] = ci_json(stats::mean_ci(lost, 0.99));
    out.results["stockout_fraction"] = ci_json(stats::mean_ci(stockout, 0.99));
    out.results["average_level"] = ci_json(stats::mean_ci(level, 0.99));
  }
  if (c.want_csv) out.csv = runs.front().csv;
  return out;
}

// genetics ------------------------------------------------------------------

json genotypes_json(const genetics::GenotypeFreqs& g) {
  return {{"p_aa", g.p_aa}, {"p_ab", g.p_ab}, {"p_bb", g.p_bb}};
}

Outcome genetics_hw(const Context& c) {
  genetics::GenotypeFreqs g;
  genetics::GeneFreqs genes;
  if (c.p.has("observed_fraction")) {
    const auto inferred = genetics::infer_from_recessive_phenotype(c.p.real("observed_fraction"));
    g = inferred.genotypes;
    genes = inferred.genes;
  } else {
    if (!c.p.has("p_aa") || !c.p.has("p_ab") || !c.p.has("p_bb"))
      throw DomainError("genetics hw: give --observed_fraction or all of --p_aa --p_ab --p_bb");
    g = {c.p.real("p_aa"), c.p.real("p_ab"), c.p.real("p_bb")};
    genes = genetics::gene_frequencies(g);
  }
  const auto next = genetics::next_generation(g);
  const auto m = genetics::mating_probabilities(g);
  const double drift = std::max({std::abs(next.p_aa - g.p_aa), std::abs(next.p_ab - g.p_ab),
                                 std::abs(next.p_bb - g.p_bb)});
  Outcome out;
  out.results = {{"genes", {{"p_a", genes.p_a}, {"p_b", genes.p_b}}},
                 {"genotypes", genotypes_json(g)},
                 {"next_generation", genotypes_json(next)},
                 {"mating", {{"aa_aa", m.aa_aa}, {"ab_ab", m.ab_ab}, {"bb_bb", m.bb_bb},
                             {"aa_ab", m.aa_ab}, {"aa_bb", m.aa_bb}, {"ab_bb", m.ab_bb}}},
                 {"in_equilibrium", drift <= 1e-12}};
  const auto after = genetics::gene_frequencies(next);
  out.oracle = {{"mating_total_defect", std::abs(m.total() - 1.0)},
                {"gene_frequency_drift", std::abs(after.p_a - genes.p_a)}};
  return out;
}

Outcome genetics_wf_simulate(const Context& c) {
  const genetics::WrightFisherModel model(c.p.integer("two_n"));
  const auto x0 = c.p.integer("x0");
  const auto max_gen = c.p.integer("max_generations");
  struct Run {
    json summary;
    double fixed = 0.0, generations = 0.0;
    bool absorbed = false;
    std::optional<std::string> csv;
  };
  const auto runs = replicate(c, [&](RngStream& rng, std::size_t i) {
    const bool keep = c.want_csv && i == 0;
    const auto run = genetics::simulate_wright_fisher(model, x0, max_gen, rng, keep);
    Run r;
    r.summary = genetics::to_json(run);
    r.summary.erase("trajectory");
    r.fixed = run.fixed() ? 1.0 : 0.0;
    r.absorbed = run.absorbed_at.has_value();
    r.generations = static_cast<double>(run.generations);
    if (keep) {
      std::ostringstream csv;
      csv << "time,value\n";
      for (std::size_t g = 0; g < run.trajectory.size(); ++g) csv << g << ',' << run.trajectory[g] << '\n';
      r.csv = csv.str();
    }
    return r;
  });
  Outcome out;
  json list = json::array();
  std::vector<double> fixed, generations;
  std::size_t absorbed = 0;
  for (const auto& r : runs) {
    list.push_back(r.summary);
    fixed.push_back(r.fixed);
    generations.push_back(r.generations);
    absorbed += r.absorbed;
  }
  const double closed_form = static_cast<double>(x0) / static_cast<double>(model.two_n());
  out.results = {{"runs", list}, {"absorbed", absorbed}};
  out.oracle["fixation_probability"] = closed_form;
  if (runs.size() >= 2) {
    const auto ci = stats::mean_ci(fixed, 0.99);
    out.results["fixation_frequency"] = ci_json(ci);
    out.results["generations"] = ci_json(stats::mean_ci(generations, 0.99));
    out.oracle["fixation_check"] = check_json(closed_form, ci);
  }
  if (c.want_csv) out.csv = runs.front().csv;
  return out;
}

Outcome genetics_wf_fixation(const Context& c) {
  const genetics::WrightFisherModel model(c.p.integer("two_n"));
  const auto x0 = c.p.integer("x0");
  const double exact = genetics::fixation_probability_exact(model, x0);
  const double closed_form = static_cast<double>(x0) / static_cast<double>(model.two_n());
  double mean_defect = 0.0;
  for (std::int64_t j = 0; j <= model.two_n(); ++j)
    mean_defect = std::max(mean_defect, std::abs(genetics::conditional_mean_check(model, j) - static_cast<double>(j)));
  Outcome out;
  out.results = {{"fixation_probability", exact}};
  out.oracle = {{"closed_form", closed_form},
                {"difference", std::abs(exact - closed_form)},
                {"conditional_mean_defect", mean_defect}};
  return out;
}

Outcome genetics_diffusion(const Context& c) {
  const double t = c.p.real("t");
  genetics::DiffusionGridSpec spec;
  spec.points = c.p.count("points", 3);
  spec.dt = c.p.maybe_real("dt");
  const auto x = genetics::diffusion_grid_points(spec.points);
  Outcome out;
  std::ostringstream csv;
  if (c.p.text("direction") == "forward") {
    const double centre = c.p.real("centre");
    const double width = c.p.real("width");
    detail::require(centre > 0.0 && centre < 1.0, "genetics diffusion: --centre must lie in (0, 1)");
    std::vector<double> f0(x.size(), 0.0);
    if (c.p.text("initial") == "spike") {
      const auto nearest = static_cast<std::size_t>(std::lround(centre * static_cast<double>(x.size() - 1)));
      f0[std::clamp<std::size_t>(nearest, 1, x.size() - 2)] = 1.0;
    } else {
      detail::require(width > 0.0, "genetics diffusion: --width must be > 0");
      for (std::size_t i = 0; i < x.size(); ++i) f0[i] = std::exp(-0.5 * std::pow((x[i] - centre) / width, 2));
    }
    double first0 = -1.0, mass_err = 0.0, moment_err = 0.0;
    const auto g = genetics::solve_kolmogorov_forward(
        genetics::wright_fisher_diffusion, {}, f0, spec, t, [&](const genetics::DiffusionGrid& s) {
          if (first0 < 0.0) first0 = s.total_first_moment();
          mass_err = std::max(mass_err, std::abs(s.total_mass() - 1.0));
          moment_err = std::max(moment_err, std::abs(s.total_first_moment() - first0));
        });
    out.results = {{"dt", g.dt},
                   {"interior_mass", g.interior_mass()},
                   {"absorbed_mass_0", g.absorbed_mass_0},
                   {"absorbed_mass_1", g.absorbed_mass_1},
                   {"total_mass", g.total_mass()},
                   {"first_moment", g.total_first_moment()},
                   {"heterozygosity", g.expectation([](double y) { return 2.0 * y * (1.0 - y); })}};
    out.oracle = {{"max_mass_defect", mass_err}, {"max_first_moment_drift", moment_err}};
    out.results["x"] = g.x_points;
    out.results["density"] = g.density;
    genetics::write_csv(csv, g);
  } else {
    const auto& terminal = c.p.text("terminal");
    genetics::Coefficient g;
    if (terminal == "identity")
      g = [](double y) { return y; };
    else if (terminal == "square")
      g = [](double y) { return y * y; };
    else
      g = [](double y) { return 0.5 * (1.0 + std::tanh((y - 0.9) / 0.02)); };
    const auto u = genetics::solve_kolmogorov_backward(genetics::wright_fisher_diffusion, {}, g, spec, t);
    double to_identity = 0.0;
    for (std::size_t i = 0; i < u.x_points.size(); ++i)
      to_identity = std::max(to_identity, std::abs(u.values[i] - u.x_points[i]));
    out.results = {{"dt", u.dt}, {"x", u.x_points}, {"values", u.values}};
    out.oracle = {{"max_distance_to_identity", to_identity}};
    genetics::write_csv(csv, u);
  }
  if (c.want_csv) out.csv = csv.str();
  return out;
}

// finance -------------------------------------------------------------------

finance::BinomialMarket market_from(const Params& p) {
  finance::BinomialMarket m{p.real("s0"), p.real("u"), p.real("d"), p.real("r"), p.real("p_up")};
  finance::validate(m);
  const auto check = finance::check_no_arbitrage(m);
  if (!check.arbitrage_free) throw ArbitrageError(check.diagnostic);
  return m;
}

finance::OptionKind kind_from(const Params& p) {
  return p.text("kind") == "put" ? finance::OptionKind::put : finance::OptionKind::call;
}

std::vector<ParamSpec> market_params() {
  return {real_param("s0", "100", "initial share price"),
          real_param("u", "1.2", "up factor"),
          real_param("d", "0.9", "down factor"),
          real_param("r", "0.1", "per-period risk-free rate"),
          real_param("p_up", "0.5", "real-world up probability (never used for pricing)"),
          real_param("strike", "100", "exercise price K"),
          choice_param("kind", "call", {"call", "put"}, "option kind")};
}

Outcome finance_price(const Context& c) {
  const auto m = market_from(c.p);
  const auto kind = kind_from(c.p);
  const double k = c.p.real("strike");
  const double cu = finance::payoff(kind, k, m.s0 * m.u);
  const double cd = finance::payoff(kind, k, m.s0 * m.d);
  const double price = finance::price_one_period(m, cu, cd);
  const auto rep = finance::replicate_one_period(m, cu, cd);
  Outcome out;
  out.results = finance::price_report(price, price, price, finance::risk_neutral_q(m), rep);
  out.results["payoff_up"] = cu;
  out.results["payoff_down"] = cd;
  out.oracle = {{"replication_residual", std::abs(price - rep.value())}};
  return out;
}

Outcome finance_tree(const Context& c) {
  const auto m = market_from(c.p);
  const auto kind = kind_from(c.p);
  const finance::OptionSpec option{c.p.real("strike"), c.p.count("periods", 1), kind};
  const auto tree = finance::price_multi_period(m, option);
  auto other = option;
  other.kind = kind == finance::OptionKind::call ? finance::OptionKind::put : finance::OptionKind::call;
  const double opposite = finance::price_multi_period(m, other).price;
  const double call = kind == finance::OptionKind::call ? tree.price : opposite;
  const double put = kind == finance::OptionKind::call ? opposite : tree.price;
  const double forward = m.s0 - option.strike * std::pow(1.0 + m.r, -static_cast<double>(option.periods));
  Outcome out;
  out.results = {{"price", tree.price}, {"q", tree.q}, {"periods", option.periods}};
  if (option.periods <= 12) out.results["values"] = tree.values;
  out.oracle = {{"martingale_defect", finance::discounted_martingale_defect(m, option.periods)},
                {"put_call_parity_residual", std::abs(call - put - forward)}};
  return out;
}

Outcome finance_mc(const Context& c) {
  const finance::GbmParams g{c.p.real("s0"), c.p.real("mu"), c.p.real("sigma"), c.p.real("r")};
  const auto kind = kind_from(c.p);
  const double k = c.p.real("strike");
  const double maturity = c.p.real("maturity");
  const std::size_t paths = c.p.count("paths", 100);
  const std::size_t tree_steps = c.p.count("tree_steps", 1);
  const double tree = finance::price_multi_period(finance::crr_market(g, maturity, tree_steps),
                                                  {k, tree_steps, kind}).price;
  json list = json::array();
  for (std::size_t i = 0; i < c.replications; ++i) {
    const auto mc = finance::mc_price_european(g, kind, k, maturity, paths, RngStream(c.seed, i));
    list.push_back({{"price", ci_json(mc.estimate)}, {"tree_check", check_json(tree, mc.estimate)}});
  }
  Outcome out;
  out.results = {{"paths", paths}, {"runs", list}};
  out.oracle = {{"tree_price", tree}, {"tree_steps", tree_steps}};
  return out;
}

// Registry ------------------------------------------------------------------

std::vector<ParamSpec> concat(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<Entry> build_registry() {
  std::vector<Entry> r;
  auto add = [&](std::string name, std::string summary, std::vector<ParamSpec> params,
                 bool stochastic, bool csv, Runner run) {
    r.push_back({{std::move(name), std::move(summary), std::move(params), stochastic, csv}, std::move(run)});
  };

  add("laws pmf", "pmf, cdf and tail table of a discrete law, with its moments",
      concat(discrete_law_params(), {int_param("k_max", "", "last k in the table (default: whole support "
                                                        "or tail < 1e-12)")}),
      false, false, laws_pmf);
  add("laws sample", "seeded draws from a law with CI and goodness-of-fit",
      concat(discrete_law_params({"exponential", "normal", "interval"}),
             {int_param("count", "10000", "draws per replication"),
              real_param("mu", "0", "normal mean"), real_param("sigma2", "1", "normal variance"),
              real_param("a", "0", "interval law left end"), real_param("b", "1", "interval law right end")}),
      true, false, laws_sample);

  add("process poisson", "Poisson process path by exponential interarrivals",
      {real_param("lambda", "1", "rate"), real_param("horizon", "20", "observation horizon")}, true, true,
      process_poisson);
  add("process walk", "simple random walk and its rescaling X_floor(Nt)/sqrt(N)",
      {int_param("steps", "1000", "number of steps"),
       int_param("scale", "", "rescaling N (default: steps)"), real_param("t", "1", "rescaled time")},
      true, true, process_walk);
  add("process wiener", "Wiener path on a uniform grid",
      {real_param("t_end", "1", "final time"), int_param("steps", "1000", "grid intervals")}, true, true,
      process_wiener);

  add("markov transient", "forward law of a chain by RK4 (birth-death or JSON generator)",
      {text_param("generator", "JSON generator file {size, rates: [[from, to, rate]]}"),
       real_param("lambda", "1", "birth rate"), real_param("mu", "2", "death rate"),
       int_param("n_max", "", "truncation level (default: 1e-10 tail rule)"),
       int_param("initial", "0", "initial state"), real_param("t", "10", "time"),
       real_param("dt", "", "RK4 step (default 0.05 / max q)")},
      false, false, markov_transient);
  add("markov stationary", "stationary law (power iteration or birth-death product form)",
      {text_param("matrix", "JSON transition matrix file {size, entries: [[from, to, p]]}"),
       real_param("tol", "1e-12", "power-iteration tolerance"), real_param("lambda", "1", "birth rate"),
       real_param("mu", "2", "death rate"), int_param("n_max", "", "truncation level")},
      false, false, markov_stationary);
  add("markov classify", "absorbing / recurrent / transient labels of a finite chain",
      {text_param("matrix", "JSON transition matrix file"),
       int_param("two_n", "10", "Wright-Fisher pool size used when no matrix is given")},
      false, false, markov_classify);

  add("queue analyze", "steady-state M/M/1 measures",
      {required(real_param("lambda", "", "arrival rate")), required(real_param("mu", "", "service rate")),
       real_param("truncation_tail", "1e-12", "pmf truncation tail")},
      false, false, queue_analyze);
  add("queue simulate", "FIFO M/M/1 discrete-event simulation with batch-means CIs",
      {required(real_param("lambda", "", "arrival rate")), required(real_param("mu", "", "service rate")),
       int_param("customers", "100000", "arrivals simulated"),
       real_param("warmup", "0.1", "fraction of customers discarded"),
       int_param("batches", "20", "batch count"), real_param("level", "0.99", "confidence level")},
      true, true, queue_simulate);
  add("queue transient", "transient M/M/1 law from the truncated forward equations",
      {required(real_param("lambda", "", "arrival rate")), required(real_param("mu", "", "service rate")),
       int_param("initial", "0", "initial users"), real_param("t", "10", "time"),
       int_param("n_max", "", "truncation level (default: 1e-10 tail rule)")},
      false, false, queue_transient);
  add("queue inventory", "(r, s) inventory with lost sales and exponential lead times",
      {int_param("r", "1", "reorder point"), int_param("s", "5", "order-up-to level"),
       int_param("initial", "", "initial level (default: s)"),
       real_param("demand_rate", "1", "unit demand rate"), real_param("lead_rate", "2", "lead-time rate"),
       real_param("horizon", "10000", "simulated time")},
      true, true, queue_inventory);

  add("genetics hw", "Hardy-Weinberg genotype algebra",
      {real_param("observed_fraction", "", "recessive phenotype fraction P_BB"),
       real_param("p_aa", "", "genotype AA"), real_param("p_ab", "", "genotype AB"),
       real_param("p_bb", "", "genotype BB")},
      false, false, genetics_hw);
  add("genetics wf-simulate", "Wright-Fisher simulation to absorption",
      {int_param("two_n", "20", "allele pool size 2N"), int_param("x0", "10", "initial allele count"),
       int_param("max_generations", "1000000", "generation cap")},
      true, true, genetics_wf_simulate);
  add("genetics wf-fixation", "exact fixation probability from the absorbing-chain system",
      {int_param("two_n", "20", "allele pool size 2N"), int_param("x0", "10", "initial allele count")}, false,
      false, genetics_wf_fixation);
  add("genetics diffusion", "Kolmogorov forward/backward solve for a = x(1-x)",
      {choice_param("direction", "forward", {"forward", "backward"}, "equation"),
       real_param("t", "1", "time span (diffusion units; 1 = 2N generations)"),
       int_param("points", "201", "grid points on [0, 1]"), real_param("dt", "", "time step"),
       choice_param("initial", "spike", {"spike", "hump"}, "forward initial density"),
       real_param("centre", "0.5", "initial density centre"), real_param("width", "0.05", "hump width"),
       choice_param("terminal", "identity", {"identity", "square", "step"}, "backward terminal function")},
      false, true, genetics_diffusion);

  add("finance price", "one-period replication and risk-neutral price", market_params(), false, false,
      finance_price);
  add("finance tree", "multi-period binomial tree price",
      concat(market_params(), {int_param("periods", "2", "number of periods")}), false, false, finance_tree);
  add("finance mc", "Monte Carlo GBM price under Q against a CRR tree",
      {real_param("s0", "100", "initial share price"), real_param("mu", "0.05", "real-world drift"),
       real_param("sigma", "0.2", "volatility"), real_param("r", "0.05", "continuous rate"),
       real_param("strike", "100", "exercise price"), real_param("maturity", "1", "maturity"),
       int_param("paths", "100000", "Monte Carlo paths"), int_param("tree_steps", "1000", "CRR steps"),
       choice_param("kind", "call", {"call", "put"}, "option kind")},
      true, false, finance_mc);

  std::sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.info.name < b.info.name; });
  return r;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = build_registry();
  return entries;
}

const Entry& find_entry(const std::string& name) {
  for (const auto& e : registry())
    if (e.info.name == name) return e;
  throw DomainError("unknown experiment '" + name + "' (see `workbench list`)");
}

const char* type_name(ParamType t) {
  switch (t) {
    case ParamType::real:
      return "real";
    case ParamType::integer:
      return "integer";
    case ParamType::text:
      return "text";
    case ParamType::choice:
      return "choice";
  }
  return "unknown";
}

}  // namespace

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo& find_experiment(const std::string& name) { return find_entry(name).info; }

nlohmann::json catalogue_json() {
  json list = json::array();
  for (const auto& info : list_experiments()) {
    json params = json::array();
    for (const auto& p : info.params) {
      json item = {{"name", p.name}, {"type", type_name(p.type)}, {"help", p.help}, {"required", p.required}};
      item["default"] = p.default_value.empty() ? json(nullptr) : json(p.default_value);
      if (!p.choices.empty()) item["choices"] = p.choices;
      params.push_back(item);
    }
    list.push_back({{"name", info.name},
                    {"summary", info.summary},
                    {"stochastic", info.stochastic},
                    {"csv", info.has_csv},
                    {"params", params}});
  }
  return {{"schema_version", kSchemaVersion}, {"experiments", list}};
}

Report run(const ExperimentConfig& config) {
  const auto& entry = find_entry(config.command);
  const auto& info = entry.info;
  if (config.output != "json" && config.output != "csv")
    throw DomainError("--output must be json or csv, got '" + config.output + "'");
  if (config.output == "csv" && !info.has_csv)
    throw DomainError(info.name + ": no CSV output; use --output json");
  if (config.replications < 1 || config.replications > kMaxReplications)
    throw DomainError("--replications must lie in 1..1e7");
  if (!info.stochastic && config.replications != 1)
    throw DomainError(info.name + " is deterministic; --replications must be 1");
  if (info.stochastic && !config.seed)
    throw DomainError(info.name + " samples: give --seed or set WORKBENCH_SEED");

  const Params params(info, config.parameters);
  const Context ctx{params, config.seed.value_or(0), static_cast<std::size_t>(config.replications),
                    config.output == "csv"};
  Outcome outcome = entry.run(ctx);

  json echoed = {{"command", info.name},
                 {"parameters", params.echo()},
                 {"replications", config.replications},
                 {"output", config.output}};
  echoed["seed"] = info.stochastic ? json(*config.seed) : json(nullptr);
  Report report;
  report.document = {{"schema_version", kSchemaVersion},
                     {"command", info.name},
                     {"config", echoed},
                     {"results", std::move(outcome.results)}};
  if (!outcome.oracle.empty()) report.document["oracle"] = std::move(outcome.oracle);
  report.csv = std::move(outcome.csv);
  return report;
}

}  // namespace workbench::tools
