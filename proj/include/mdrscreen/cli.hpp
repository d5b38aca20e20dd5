#pragma once

#include <iosfwd>

namespace mdr {

/// Command-line entry point. Results go to --output (or `out` when it is
/// "-"), diagnostics to `err`. Returns 0 on success, 1 on invalid input or
/// usage, 2 on runtime failure.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mdr
