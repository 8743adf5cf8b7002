#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracsee {

/// Command-line entry point: simulate, check, ml-eval, heat-example.
/// Module failures are reported on `err` as one JSON object and give exit
/// code 2; `check` exits 1 when the existence condition fails.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracsee
