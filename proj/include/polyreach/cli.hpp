#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polyreach {

// Subcommand dispatch. Exit code 0: goal proven (Yes), 1: Unknown,
// 2: usage or runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polyreach
