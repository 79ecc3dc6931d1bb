#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace finslerlab::cli {

enum ExitCode : int {
  ok = 0,
  validation_failure = 2,
  domain_failure = 3,
  precondition_failure = 4,
  usage_error = 64,
};

// Runs one command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finslerlab::cli
