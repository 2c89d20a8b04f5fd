#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>

#include "workbench/error.hpp"
#include "workbench_tools/experiments.hpp"

namespace workbench::tools {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw DomainError("config line " + std::to_string(number) + ": empty key");
    if (values.contains(key))
      throw DomainError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t seed = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, seed);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw DomainError("seed must be an unsigned 64-bit integer, got '" + text + "'");
  return seed;
}

void apply_key_values(ExperimentConfig& config, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (key == "command") {
      config.command = value;
    } else if (key == "seed") {
      config.seed = parse_seed(value);
    } else if (key == "replications") {
      std::uint64_t r = 0;
      const auto* end = value.data() + value.size();
      const auto [ptr, ec] = std::from_chars(value.data(), end, r);
      if (value.empty() || ec != std::errc{} || ptr != end || r < 1)
        throw DomainError("replications must be an integer >= 1, got '" + value + "'");
      config.replications = r;
    } else if (key == "output") {
      config.output = value;
    } else if (key == "output_path") {
      config.output_path = value;
    } else {
      config.parameters[key] = value;
    }
  }
}

ExperimentConfig config_from_json(const nlohmann::json& echoed) {
  if (!echoed.is_object() || !echoed.contains("command") || !echoed["command"].is_string())
    throw DomainError("config: expected an object with a string 'command'");
  ExperimentConfig config;
  config.command = echoed["command"].get<std::string>();
  if (echoed.contains("parameters")) {
    for (const auto& [key, value] : echoed["parameters"].items())
      config.parameters[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  if (echoed.contains("seed") && !echoed["seed"].is_null()) {
    if (!echoed["seed"].is_number_unsigned()) throw DomainError("config: seed must be unsigned");
    config.seed = echoed["seed"].get<std::uint64_t>();
  }
  if (echoed.contains("replications")) {
    if (!echoed["replications"].is_number_unsigned() || echoed["replications"].get<std::uint64_t>() < 1)
      throw DomainError("config: replications must be an integer >= 1");
    config.replications = echoed["replications"].get<std::uint64_t>();
  }
  if (echoed.contains("output")) config.output = echoed["output"].get<std::string>();
  return config;
}

std::string render(const Report& report, const std::string& output) {
  if (output == "csv") {
    if (!report.csv) throw DomainError("this experiment has no CSV output; use --output json");
    return *report.csv;
  }
  return report.document.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot open '" + temp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw DomainError("failed writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(temp, ignored);
    throw DomainError("cannot move output into '" + path + "': " + ec.message());
  }
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const DomainError&) {
    return 2;
  } catch (const nlohmann::json::exception&) {
    return 2;
  } catch (const ModelError&) {
    return 3;
  } catch (...) {
    return 1;
  }
}

}  // namespace workbench::tools
