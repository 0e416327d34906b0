#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdeblur::cli {

/// Runs the command line with argv-style arguments (args[0] is the
/// program name). Returns 0 on success, 1 on user or input errors and 2
/// when the solver hits a non-finite value.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdeblur::cli
