#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "workbench/error.hpp"
#include "workbench_tools/experiments.hpp"

namespace {

using workbench::DomainError;
using namespace workbench::tools;

struct CommonOptions {
  std::string config_path;
  std::string seed;
  std::string replications;
  std::string output;
  std::string output_path;
};

void add_common_options(CLI::App& app, CommonOptions& common) {
  app.add_option("--config", common.config_path, "key=value config file (flags override it)");
  app.add_option("--seed", common.seed, "64-bit seed (default: $WORKBENCH_SEED)");
  app.add_option("--replications", common.replications, "independent replications");
  app.add_option("--output", common.output, "json or csv");
  app.add_option("--output-path", common.output_path, "write here instead of standard output");
}

ExperimentConfig assemble(const ExperimentConfig& base, const CommonOptions& common,
                          const std::map<std::string, std::string>& flags) {
  ExperimentConfig config = base;
  if (!common.config_path.empty()) {
    std::ifstream in(common.config_path);
    if (!in) throw DomainError("cannot open config '" + common.config_path + "'");
    const auto values = parse_key_values(in);
    const auto cmd = values.find("command");
    if (cmd != values.end() && !config.command.empty() && cmd->second != config.command)
      throw DomainError("config names '" + cmd->second + "' but the command line runs '" +
                        config.command + "'");
    apply_key_values(config, values);
  }
  std::map<std::string, std::string> reserved;
  if (!common.seed.empty()) reserved["seed"] = common.seed;
  if (!common.replications.empty()) reserved["replications"] = common.replications;
  if (!common.output.empty()) reserved["output"] = common.output;
  if (!common.output_path.empty()) reserved["output_path"] = common.output_path;
  apply_key_values(config, reserved);
  for (const auto& [key, value] : flags) config.parameters[key] = value;
  if (!config.seed) {
    if (const char* env = std::getenv("WORKBENCH_SEED"); env && *env) config.seed = parse_seed(env);
  }
  if (config.command.empty()) throw DomainError("no command given (config key 'command')");
  return config;
}

void emit(const ExperimentConfig& config, const Report& report) {
  const std::string text = render(report, config.output);
  if (config.output_path.empty())
    std::cout << text << std::flush;
  else
    write_atomically(config.output_path, text);
}

void print_catalogue(const std::string& format) {
  if (format == "json") {
    std::cout << catalogue_json().dump(2) << '\n';
    return;
  }
  if (format != "text") throw DomainError("list: --output must be text or json");
  for (const auto& info : list_experiments()) {
    std::cout << info.name << (info.stochastic ? "  [seeded]" : "") << "\n  " << info.summary << '\n';
    for (const auto& p : info.params) {
      std::cout << "    --" << p.name;
      if (p.required)
        std::cout << " (required)";
      else if (!p.default_value.empty())
        std::cout << " = " << p.default_value;
      std::cout << "  " << p.help << '\n';
    }
  }
}

int replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open report '" + path + "'");
  nlohmann::json recorded;
  try {
    recorded = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("'" + path + "' is not a JSON report: " + e.what());
  }
  if (!recorded.is_object() || !recorded.contains("config"))
    throw DomainError("'" + path + "' has no 'config' member");
  auto config = config_from_json(recorded["config"]);
  config.output = "json";
  const auto fresh = run(config);
  if (fresh.document == recorded) {
    std::cout << "replay: identical (" << config.command << ")\n";
    return 0;
  }
  std::cerr << "replay: results differ from '" << path << "'\n";
  const auto patch = nlohmann::json::diff(recorded, fresh.document);
  std::cerr << patch.dump(2) << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-modelling workbench"};
  app.require_subcommand(1);

  std::string list_format = "text";
  auto* list = app.add_subcommand("list", "list experiments and their parameters");
  list->add_option("--output", list_format, "text or json");

  CommonOptions run_common;
  auto* run_cmd = app.add_subcommand("run", "run the experiment named in a config file");
  add_common_options(*run_cmd, run_common);
  run_cmd->get_option("--config")->required();

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a JSON report and compare the results");
  replay_cmd->add_option("report", replay_path, "report written with --output json")->required();

  struct Leaf {
    std::string name;
    CLI::App* app = nullptr;
    CommonOptions common;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<std::unique_ptr<Leaf>> leaves;
  std::map<std::string, CLI::App*> groups;
  for (const auto& info : list_experiments()) {
    const auto space = info.name.find(' ');
    const std::string group = info.name.substr(0, space);
    const std::string leaf_name = info.name.substr(space + 1);
    if (!groups.contains(group)) {
      groups[group] = app.add_subcommand(group, group + " experiments");
      groups[group]->require_subcommand(1);
    }
    auto leaf = std::make_unique<Leaf>();
    leaf->name = info.name;
    leaf->app = groups[group]->add_subcommand(leaf_name, info.summary);
    add_common_options(*leaf->app, leaf->common);
    for (const auto& p : info.params) {
      std::string help = p.help;
      if (!p.default_value.empty()) help += " [" + p.default_value + "]";
      if (p.required) help += " (required)";
      leaf->options[p.name] = leaf->app->add_option("--" + p.name, leaf->values[p.name], help);
    }
    leaves.push_back(std::move(leaf));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      print_catalogue(list_format);
      return 0;
    }
    if (replay_cmd->parsed()) return replay(replay_path);
    if (run_cmd->parsed()) {
      const auto config = assemble({}, run_common, {});
      emit(config, run(config));
      return 0;
    }
    for (const auto& leaf : leaves) {
      if (!leaf->app->parsed()) continue;
      std::map<std::string, std::string> flags;
      for (const auto& [name, option] : leaf->options)
        if (option->count() > 0) flags[name] = leaf->values[name];
      ExperimentConfig base;
      base.command = leaf->name;
      const auto config = assemble(base, leaf->common, flags);
      emit(config, run(config));
      return 0;
    }
    throw DomainError("no experiment selected");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for_current_exception();
  }
}
