#pragma once

#include <iosfwd>

namespace salpchain::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

/// Entry point shared by the executable and the tests.
int cliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cliMain(int argc, const char* const* argv);

}  // namespace salpchain::cli
