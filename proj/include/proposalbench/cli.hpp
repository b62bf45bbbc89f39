#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace proposalbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInternalError = 2;

/// Entry point behind the `proposalbench` executable. `args` excludes the
/// program name. Returns 0 on success, 1 on input or validation errors and
/// 2 on internal errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace proposalbench
