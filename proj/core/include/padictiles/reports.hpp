#pragma once

#include <string>

#include "padictiles/json_io.hpp"

namespace ptiles::cli {

using io::Json;

/// One CLI invocation. `input` is the parsed JSON problem description.
struct Command {
  std::string verb;
  Json input;
  int truncation = -1;       // -1: verb-specific default
  long budget = -1;          // backtracking node budget; -1 unlimited
  unsigned long seed = 1;    // reserved for randomized suites; echoed in reports
  bool want_dot = false;
};

/// Exit status contract: 0 pass, 1 verified negative, 2 input error,
/// 3 budget exhausted (partial results flagged non-exhaustive).
struct RunResult {
  int exit_code = 0;
  Json report;
  std::string dot;  // nonempty when the verb produced a figure
};

RunResult run(const Command& cmd);

/// Exhaustive tile/spectral/homogeneous census of a small group.
Json census(const finite::ProductGroup& g, long budget, bool* exhausted);

std::string input_digest(const Json& input);

}  // namespace ptiles::cli
