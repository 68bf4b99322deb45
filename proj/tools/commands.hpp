#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace marginforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Entry point of the `marginforge` tool. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace marginforge::cli
