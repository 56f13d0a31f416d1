#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace footprint::cli {

// Exit codes: 0 success, 1 usage error, 2 input/data error, 3 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

/// Run one CLI invocation. `args` excludes the program name. The environment
/// variable FOOTPRINT_CORPUS supplies a default --corpus directory.
int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

} // namespace footprint::cli
