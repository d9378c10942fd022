#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lowcoll::cli {

/// Entry point of the `lowcoll` tool. Exit codes: 0 success, 2 usage or
/// validation error, 3 internal error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with argv[0] supplied internally.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lowcoll::cli
