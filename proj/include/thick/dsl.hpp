#pragma once

// Expression language for distributions and test functions: parser, printer,
// program runner and report serialisation.

#include "thick/checks.hpp"
#include "thick/errors.hpp"
#include "thick/pairing.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace thick::dsl {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class Command { eval, derive, project, expand, check };

std::string_view command_name(Command c);
std::optional<Command> command_from_name(std::string_view name);

// A failure detected while building a statement's objects (bad radius,
// thick-point mismatch, ...); reported as an evaluation error of that query.
struct Failure {
  std::string kind;
  std::string message;
};

struct Query {
  Command command;
  int line = 0;
  std::string source;  // statement text, led by the command name
  std::optional<ThickDistribution> dist;
  std::optional<ThickTestFunction> test;
  int order = 0;       // expand
  std::string suite;   // check; empty runs every suite
  std::vector<std::string> warnings;
  std::optional<Failure> failure;
};

using Value = std::variant<ThickDistribution, ThickTestFunction, Multiplier>;

struct Binding {
  std::string name;
  std::optional<Value> value;  // empty when construction failed
  std::optional<Failure> failure;
};

struct Program {
  std::vector<Binding> bindings;
  std::vector<Query> queries;
};

// Statements are separated by newlines or ';', '#' starts a comment.
//   dist NAME = <dist>      test NAME = <testfn>      mult NAME = <mult>
//   eval <dist>, <testfn>   project <dist>, <testfn>  derive <dist>
//   expand <testfn>, <int>  check [<suite>]
// A statement that starts with none of these keywords is read as the
// arguments of `default_command`; without one it is a parse error.
Program parse(std::string_view text, std::optional<Command> default_command = std::nullopt);

ThickDistribution parse_distribution(std::string_view text);
ThickTestFunction parse_test_function(std::string_view text);
Multiplier parse_multiplier(std::string_view text);

std::string print(const ThickDistribution& f);
std::string print(const ThickTestFunction& phi);
std::string print(const Multiplier& psi);
std::string print_node(const Node& n);
std::string print_number(double v);
std::string print_exponent(const Exponent& e);

struct Record {
  Command command;
  std::string input;   // normalised print of the query
  std::string output;  // printed value, normal form or expansion
  std::optional<PairingResult> pairing;
  std::vector<CheckOutcome> checks;
  std::vector<std::string> warnings;
  std::optional<Failure> error;
};

struct Report {
  std::vector<Record> records;

  bool any_check_failed() const;
  bool any_error() const;
  std::string text() const;
  // One JSON object per line, one line per record.
  std::string json() const;
};

Report run(const Program& program, const QuadratureConfig& cfg);

}  // namespace thick::dsl
