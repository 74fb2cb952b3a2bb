#pragma once

namespace dpoint {

/// Entry point of the distortion-point CLI. Exit codes: 0 success, 1 bad
/// input or usage error, 2 pipeline failure. Errors are printed to stderr as
/// one-line JSON objects.
int run_cli(int argc, const char* const* argv);

}  // namespace dpoint
