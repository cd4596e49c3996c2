#pragma once

// Named invariant suites run by the `check` command.

#include "thick/pairing.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace thick {

struct CheckOutcome {
  std::string name;
  double observed;
  double expected;
  double tolerance;
  bool pass;
};

// expansion, pairing, paskusz, projection, a-independence.
const std::vector<std::string>& suite_names();

// Throws DomainError for an unknown suite name.
std::vector<CheckOutcome> run_suite(std::string_view name, const QuadratureConfig& cfg);

}  // namespace thick
