#pragma once

// Command-line front end: spec file in, JSON / DOT / SVG out.

#include <iosfwd>
#include <string>

#include "ifsg/spec_io.hpp"

namespace ifsg {

enum ExitCode : int {
  kExitOk = 0,          // success or positive verdict
  kExitNegative = 10,   // negative verdict with witness
  kExitAmbiguous = 20,  // inconclusive: no stable answer
  kExitResource = 30,   // inconclusive: budget exhausted
  kExitUsage = 2,       // bad arguments or invalid spec
};

struct ReportOptions {
  std::size_t max_level = 3;
  std::size_t zerner_depth = 7;
  double arc_eps = 1e-3;
  double slope_tol = 1e-3;
};

/// Full pipeline as pretty-printed JSON; identical input gives identical bytes.
std::string full_report(const SystemSpec& spec, const ReportOptions& options = {});

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ifsg
