#pragma once

namespace kfpls {

/// Parses argv and runs one subcommand. Returns the process exit code:
/// 0 success, 2 config, 3 parse, 4 structural, 5 io, 6 numeric errors.
int run_cli(int argc, const char* const* argv);

}  // namespace kfpls
