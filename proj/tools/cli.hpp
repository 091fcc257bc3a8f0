#pragma once

#include <iosfwd>

namespace superrad::cli {

enum ExitCode : int {
  kOk = 0,
  kArgumentError = 2,
  kNumericalFailure = 3,
  kIoError = 4,
};

/// Entry point of the `superrad` tool. Data goes to `out` unless --out
/// names a file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace superrad::cli
