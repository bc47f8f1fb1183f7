#pragma once

#include <iosfwd>
#include <string>

namespace tinlinq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

/// Runs one `tinlinq` invocation. argv[0] is the program name. Results go to
/// `out` (or the --out file), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Version line plus one checksum per built-in fixture.
std::string version_text();

}  // namespace tinlinq::cli
