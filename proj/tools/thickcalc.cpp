// thickcalc: evaluate, derive, project, expand and check thick-distribution expressions.

#include "thick/dsl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitEvaluation = 3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key = value lines; '#' starts a comment.
void load_config(const std::string& path, thick::QuadratureConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      size_t used = 0;
      if (key == "abs_tol" || key == "tol") {
        cfg.abs_tol = std::stod(value, &used);
      } else if (key == "max_subdivisions") {
        cfg.max_subdivisions = std::stoi(value, &used);
      } else if (key == "split_radius" || key == "A") {
        cfg.split_radius = std::stod(value, &used);
      } else {
        throw std::runtime_error(path + ":" + std::to_string(number) + ": unknown key '" + key + "'");
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw std::runtime_error(path + ":" + std::to_string(number) + ": bad value '" + value + "' for " + key);
    }
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read input file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool is_suite_name(const std::string& s) {
  const auto& names = thick::suite_names();
  return std::find(names.begin(), names.end(), s) != names.end();
}

int report_parse_error(const std::string& command, const std::string& message, bool json) {
  if (json) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["error"] = {{"kind", "parse"}, {"message", message}};
    std::cout << j.dump() << "\n";
  }
  std::cerr << "thickcalc: " << message << "\n";
  return kExitParse;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate pairings of thick distributions with thick test functions"};
  std::string command;
  std::string config_path;
  std::string expression;
  std::string file;
  bool json = false;
  std::optional<double> split_radius;
  std::optional<double> tolerance;

  app.add_option("command", command, "eval | derive | project | expand | check")
      ->required()
      ->check(CLI::IsMember({"eval", "derive", "project", "expand", "check"}));
  app.add_option("file", file, "program file ('-' reads standard input), or a suite name for check");
  app.add_option("-e", expression, "program text");
  app.add_option("--config", config_path, "quadrature settings as key = value lines");
  app.add_flag("--json", json, "one JSON record per query");
  app.add_option("--A", split_radius, "split radius A");
  app.add_option("--tol", tolerance, "absolute quadrature tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  thick::QuadratureConfig cfg;
  try {
    if (!config_path.empty()) load_config(config_path, cfg);
    if (split_radius) cfg.split_radius = *split_radius;
    if (tolerance) cfg.abs_tol = *tolerance;
    cfg.validate();
  } catch (const std::exception& e) {
    return report_parse_error(command, e.what(), json);
  }

  if (!expression.empty() && !file.empty())
    return report_parse_error(command, "give either -e <expr> or a file, not both", json);

  std::string text;
  try {
    if (!expression.empty())
      text = expression;
    else if (command == "check" && is_suite_name(file) && !std::filesystem::exists(file))
      text = "check " + file;
    else if (!file.empty())
      text = read_input(file);
    else if (command == "check")
      text = "check";
    else
      return report_parse_error(command, "no input: give -e <expr> or a file", json);
  } catch (const std::exception& e) {
    return report_parse_error(command, e.what(), json);
  }

  thick::dsl::Program program;
  try {
    program = thick::dsl::parse(text, thick::dsl::command_from_name(command));
  } catch (const thick::dsl::ParseError& e) {
    return report_parse_error(command, std::string("parse error at ") + e.what(), json);
  }

  const thick::dsl::Report report = thick::dsl::run(program, cfg);
  std::cout << (json ? report.json() : report.text());
  std::cout.flush();
  if (report.any_check_failed()) return kExitCheckFailed;
  if (report.any_error()) return kExitEvaluation;
  return kExitOk;
}
