#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "workbench/error.hpp"
#include "workbench_tools/experiments.hpp"

using namespace workbench;
using namespace workbench::tools;
using nlohmann::json;

namespace {

// Parameter sets small enough for a unit test.
const std::map<std::string, std::map<std::string, std::string>>& quick_parameters() {
  static const std::map<std::string, std::map<std::string, std::string>> table = {
      {"finance mc", {{"paths", "2000"}, {"tree_steps", "50"}}},
      {"finance price", {}},
      {"finance tree", {{"periods", "3"}}},
      {"genetics diffusion", {{"points", "41"}, {"t", "0.2"}}},
      {"genetics hw", {{"observed_fraction", "0.04"}}},
      {"genetics wf-fixation", {{"two_n", "20"}, {"x0", "5"}}},
      {"genetics wf-simulate", {{"two_n", "20"}, {"x0", "10"}}},
      {"laws pmf", {{"law", "poisson"}, {"lambda", "3"}}},
      {"laws sample", {{"law", "geometric"}, {"p", "0.3"}, {"count", "2000"}}},
      {"markov classify", {{"two_n", "6"}}},
      {"markov stationary", {{"lambda", "1"}, {"mu", "2"}}},
      {"markov transient", {{"t", "2"}}},
      {"process poisson", {{"lambda", "2"}, {"horizon", "10"}}},
      {"process walk", {{"steps", "400"}}},
      {"process wiener", {{"steps", "200"}}},
      {"queue analyze", {{"lambda", "1"}, {"mu", "2"}}},
      {"queue inventory", {{"horizon", "500"}}},
      {"queue simulate", {{"lambda", "1"}, {"mu", "2"}, {"customers", "5000"}}},
      {"queue transient", {{"lambda", "1"}, {"mu", "2"}, {"t", "3"}}},
  };
  return table;
}

ExperimentConfig quick_config(const std::string& command, std::uint64_t replications = 1) {
  ExperimentConfig c;
  c.command = command;
  c.parameters = quick_parameters().at(command);
  if (find_experiment(command).stochastic) {
    c.seed = 20240611;
    c.replications = replications;
  }
  return c;
}

Report run_with(const std::string& command, std::map<std::string, std::string> params) {
  ExperimentConfig c;
  c.command = command;
  c.parameters = std::move(params);
  return run(c);
}

int exit_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (...) {
    return exit_code_for_current_exception();
  }
  return 0;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "workbench_test_cli";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("catalogue is the full subcommand tree, sorted") {
  std::vector<std::string> names;
  for (const auto& info : list_experiments()) names.push_back(info.name);
  const std::vector<std::string> expected = {
      "finance mc",        "finance price",        "finance tree",         "genetics diffusion",
      "genetics hw",       "genetics wf-fixation", "genetics wf-simulate", "laws pmf",
      "laws sample",       "markov classify",      "markov stationary",    "markov transient",
      "process poisson",   "process walk",         "process wiener",       "queue analyze",
      "queue inventory",   "queue simulate",       "queue transient"};
  CHECK(names == expected);
  CHECK(std::is_sorted(names.begin(), names.end()));
  CHECK(catalogue_json().dump() == catalogue_json().dump());
  CHECK(catalogue_json()["schema_version"] == kSchemaVersion);
  CHECK(quick_parameters().size() == names.size());
}

TEST_CASE("parameter schemas have unique names and sane defaults") {
  for (const auto& info : list_experiments()) {
    std::set<std::string> seen;
    for (const auto& p : info.params) {
      CHECK_MESSAGE(seen.insert(p.name).second, info.name << " repeats --" << p.name);
      if (p.type == ParamType::choice) {
        CHECK(!p.choices.empty());
        if (!p.default_value.empty())
          CHECK(std::find(p.choices.begin(), p.choices.end(), p.default_value) != p.choices.end());
      }
      if (p.required) CHECK(p.default_value.empty());
    }
  }
}

TEST_CASE("queue analyze example") {
  const auto r = run_with("queue analyze", {{"lambda", "1"}, {"mu", "2"}});
  const auto& res = r.document["results"];
  CHECK(res["rho"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res["e_n"].get<double>() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(res["e_nq"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res["e_tq"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.document["schema_version"] == kSchemaVersion);
  CHECK(r.document["config"]["seed"].is_null());
  CHECK(r.document["config"]["parameters"]["lambda"].get<double>() == 1.0);
}

TEST_CASE("finance price example") {
  const auto r = run_with("finance price", {{"s0", "100"}, {"u", "1.2"}, {"d", "0.9"}, {"r", "0.1"},
                                            {"strike", "100"}});
  const auto& res = r.document["results"];
  CHECK(std::abs(res["price"].get<double>() - 12.12) < 0.005);
  CHECK(std::abs(res["replication"]["shares_value"].get<double>() - 66.67) < 0.005);
  CHECK(std::abs(res["replication"]["bond"].get<double>() + 54.55) < 0.005);
  CHECK(std::abs(res["q"].get<double>() - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("exit codes: model errors 3, validation errors 2") {
  CHECK(exit_code_of([] { run_with("queue analyze", {{"lambda", "2"}, {"mu", "1"}}); }) == 3);
  CHECK_THROWS_AS(run_with("queue analyze", {{"lambda", "2"}, {"mu", "1"}}), NoSteadyStateError);
  CHECK(exit_code_of([] { run_with("finance price", {{"r", "0.3"}}); }) == 3);
  CHECK(exit_code_of([] { run_with("finance price", {{"r", "-0.2"}}); }) == 3);

  CHECK(exit_code_of([] { run_with("queue nowhere", {}); }) == 2);
  CHECK(exit_code_of([] { run_with("queue analyze", {{"lambda", "1"}}); }) == 2);
  CHECK(exit_code_of([] { run_with("queue analyze", {{"lambda", "1"}, {"mu", "two"}}); }) == 2);
  CHECK(exit_code_of([] { run_with("queue analyze", {{"lambda", "1"}, {"mu", "2"}, {"nu", "3"}}); }) == 2);
  CHECK(exit_code_of([] { run_with("laws pmf", {{"law", "cauchy"}}); }) == 2);
  CHECK(exit_code_of([] { run_with("laws pmf", {{"law", "binomial"}, {"p", "1.5"}}); }) == 2);
  CHECK(exit_code_of([] { run_with("finance tree", {{"periods", "2.5"}}); }) == 2);
  CHECK(exit_code_of([] { throw std::logic_error("x"); }) == 1);
}

TEST_CASE("config validation") {
  SUBCASE("stochastic experiments need a seed") {
    auto c = quick_config("process poisson");
    c.seed.reset();
    CHECK_THROWS_AS(run(c), DomainError);
  }
  SUBCASE("deterministic experiments take one replication") {
    auto c = quick_config("queue analyze");
    c.replications = 2;
    CHECK_THROWS_AS(run(c), DomainError);
  }
  SUBCASE("replications >= 1") {
    auto c = quick_config("process walk");
    c.replications = 0;
    CHECK_THROWS_AS(run(c), DomainError);
  }
  SUBCASE("csv only where a path or density exists") {
    auto c = quick_config("queue analyze");
    c.output = "csv";
    CHECK_THROWS_AS(run(c), DomainError);
    c.output = "yaml";
    CHECK_THROWS_AS(run(c), DomainError);
  }
  SUBCASE("a deterministic experiment ignores an offered seed") {
    auto c = quick_config("queue analyze");
    c.seed = 5;
    CHECK(run(c).document["config"]["seed"].is_null());
  }
}

TEST_CASE("determinism: identical configs give byte-identical reports") {
  for (const auto& info : list_experiments()) {
    if (!info.stochastic) continue;
    CAPTURE(info.name);
    const auto c = quick_config(info.name, 3);
    const auto a = render(run(c), "json");
    const auto b = render(run(c), "json");
    CHECK(a == b);
    auto other = c;
    other.seed = *c.seed + 1;
    CHECK(render(run(other), "json") != a);
  }
}

TEST_CASE("replication i is stream i of the seed, whatever the replication count") {
  for (const auto& info : list_experiments()) {
    if (!info.stochastic) continue;
    CAPTURE(info.name);
    const auto one = run(quick_config(info.name, 1)).document["results"]["runs"];
    const auto four = run(quick_config(info.name, 4)).document["results"]["runs"];
    REQUIRE(one.size() == 1);
    REQUIRE(four.size() == 4);
    CHECK(one[0] == four[0]);
    CHECK(four[1] != four[2]);
  }
}

TEST_CASE("round trip: the echoed config reproduces every report") {
  for (const auto& info : list_experiments()) {
    CAPTURE(info.name);
    const auto first = run(quick_config(info.name, info.stochastic ? 2 : 1));
    const auto echoed = config_from_json(first.document["config"]);
    CHECK(echoed.command == info.name);
    const auto second = run(echoed);
    CHECK(second.document == first.document);
    CHECK(render(second, "json") == render(first, "json"));
    // Echoed values are typed: numbers are JSON numbers.
    for (const auto& p : info.params) {
      if (!first.document["config"]["parameters"].contains(p.name)) continue;
      const auto& v = first.document["config"]["parameters"][p.name];
      if (p.type == ParamType::real || p.type == ParamType::integer)
        CHECK(v.is_number());
      else
        CHECK(v.is_string());
    }
  }
}

TEST_CASE("csv outputs") {
  for (const auto& info : list_experiments()) {
    if (!info.has_csv) continue;
    CAPTURE(info.name);
    auto c = quick_config(info.name);
    c.output = "csv";
    const auto report = run(c);
    REQUIRE(report.csv);
    const auto text = render(report, "csv");
    CHECK(text.find('\n') != std::string::npos);
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    CHECK(header.find(',') != std::string::npos);
    // The JSON document stays the same whether or not CSV was requested.
    auto as_json = quick_config(info.name);
    auto doc = report.document;
    doc["config"]["output"] = "json";
    CHECK(doc == run(as_json).document);
  }
  auto c = quick_config("queue simulate");
  c.output = "csv";
  const auto text = *run(c).csv;
  CHECK(text.rfind("time,event_kind,state", 0) == 0);
}

TEST_CASE("oracle sections") {
  const auto fix = run(quick_config("genetics wf-fixation")).document;
  CHECK(fix["oracle"]["difference"].get<double>() < 1e-10);
  CHECK(fix["oracle"]["conditional_mean_defect"].get<double>() < 1e-12);

  const auto tree = run(quick_config("finance tree")).document;
  CHECK(tree["oracle"]["martingale_defect"].get<double>() < 1e-10);
  CHECK(tree["oracle"]["put_call_parity_residual"].get<double>() < 1e-10);

  const auto hw = run(quick_config("genetics hw")).document["results"];
  CHECK(hw["genes"]["p_b"].get<double>() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(hw["in_equilibrium"].get<bool>());

  const auto pmf = run(quick_config("laws pmf")).document;
  CHECK(pmf["oracle"]["mass_defect"].get<double>() < 1e-12);

  const auto back = run_with("genetics diffusion", {{"direction", "backward"}, {"points", "41"}, {"t", "0.5"}});
  CHECK(back.document["oracle"]["max_distance_to_identity"].get<double>() < 1e-6);
}

TEST_CASE("markov experiments read JSON chains") {
  const auto dir = scratch_dir();
  const auto matrix = (dir / "two_state.json").string();
  {
    std::ofstream out(matrix);
    out << R"({"size": 2, "entries": [[0, 0, 0.9], [0, 1, 0.1], [1, 0, 0.3], [1, 1, 0.7]]})";
  }
  const auto s = run_with("markov stationary", {{"matrix", matrix}}).document["results"];
  CHECK(s["distribution"][0].get<double>() == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(s["unique"].get<bool>());

  const auto generator = (dir / "gen.json").string();
  {
    std::ofstream out(generator);
    out << R"({"size": 2, "rates": [[0, 1, 1.0], [1, 0, 3.0]]})";
  }
  const auto t = run_with("markov transient", {{"generator", generator}, {"t", "20"}}).document["results"];
  CHECK(t["distribution"][0].get<double>() == doctest::Approx(0.75).epsilon(1e-8));

  CHECK(exit_code_of([&] { run_with("markov stationary", {{"matrix", (dir / "missing.json").string()}}); }) == 2);
  const auto bad = (dir / "bad.json").string();
  {
    std::ofstream out(bad);
    out << R"({"size": 2, "entries": [[0, 0, 0.5]]})";
  }
  CHECK(exit_code_of([&] { run_with("markov stationary", {{"matrix", bad}}); }) == 2);
}

TEST_CASE("key=value config files") {
  std::istringstream in(
      "# M/M/1 run\n"
      "command = queue simulate\n"
      "lambda=1   # arrivals\n"
      "\n"
      "mu = 2\n"
      "seed = 42\n"
      "replications = 3\n");
  const auto values = parse_key_values(in);
  CHECK(values.size() == 5);
  ExperimentConfig c;
  apply_key_values(c, values);
  CHECK(c.command == "queue simulate");
  CHECK(c.seed == 42u);
  CHECK(c.replications == 3u);
  CHECK(c.parameters == std::map<std::string, std::string>{{"lambda", "1"}, {"mu", "2"}});

  std::istringstream dup("a=1\na=2\n");
  CHECK_THROWS_AS(parse_key_values(dup), DomainError);
  std::istringstream missing("lambda 1\n");
  CHECK_THROWS_AS(parse_key_values(missing), DomainError);
  CHECK_THROWS_AS(parse_seed("-1"), DomainError);
  CHECK_THROWS_AS(parse_seed("12x"), DomainError);
  CHECK(parse_seed("18446744073709551615") == 18446744073709551615ull);
  ExperimentConfig bad;
  CHECK_THROWS_AS(apply_key_values(bad, {{"replications", "0"}}), DomainError);
}

TEST_CASE("atomic writes leave only the target") {
  const auto dir = scratch_dir() / "atomic";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = (dir / "report.json").string();
  write_atomically(path, "first\n");
  write_atomically(path, "second\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
  CHECK_THROWS_AS(write_atomically((dir / "no" / "such" / "dir.json").string(), "x"), DomainError);
}
