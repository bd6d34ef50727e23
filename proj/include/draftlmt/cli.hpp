#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace draftlmt {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitMismatch = 4,
};

// Entry point of the draftlmt tool. `args` excludes the program name.
// Failures are written to `err` as one JSON object per line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "2001,2003-2005" -> {2001, 2003, 2004, 2005}. Throws ValidationError.
std::vector<int> parse_year_list(const std::string& text);

}  // namespace draftlmt
