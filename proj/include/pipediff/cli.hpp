// Command-line front end. run_command is what the pipediff binary calls and
// what the tests drive in-process: stdout carries data, stderr diagnostics.
//
// Exit codes: 0 success/feasible, 2 infeasible design, 3 inconsistent but
// feasible, 4 malformed input file, 5 numeric failure, 64 usage or
// configuration error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pipediff {

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pipediff
