#pragma once

#include <iosfwd>

namespace cococat::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 1,      // bad flags, schema violations, invalid parameters
  exit_numerical = 2,   // accuracy not reached, degenerate fits
  exit_io = 3,          // unreadable or malformed input files, unwritable outputs
  exit_validation = 4,  // validate found |z| > 3
};

// Entry point of the cococat executable; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cococat::cli
