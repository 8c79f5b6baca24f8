#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdo {

/// Runs one command line; args excludes the program name. Returns 0 on
/// success, 1 on validation failure, 2 on numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdo
