#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace garagemon::cli {

// Exit status contract: 0 success, 1 input/usage error, 2 internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace garagemon::cli
