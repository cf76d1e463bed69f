#pragma once

#include <iosfwd>

namespace gaussot::cli {

// Parses argv, runs one subcommand and returns its exit code. Result
// documents go to `out` (or --out), diagnostics and warnings to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gaussot::cli
