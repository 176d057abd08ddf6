#pragma once

// Command-line front end. `run` takes the arguments after the program name
// and returns the process exit code:
//   0  success
//   1  a check failed or an input violated an invariant
//   2  usage error

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ihs::cli {

inline constexpr double default_tol = 1e-8;
inline constexpr std::size_t default_samples = 1000;
inline constexpr std::uint64_t default_seed = 0;

enum ExitCode : int { ok = 0, check_failed = 1, usage_error = 2 };

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ihs::cli
