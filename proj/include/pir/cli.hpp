#pragma once

#include <iosfwd>

namespace pir {

/// Exit codes: 0 success, 1 audit found a violation (or fetch failed to
/// verify), 2 usage error, 3 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pir
