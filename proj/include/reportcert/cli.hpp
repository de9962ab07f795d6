#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reportcert::cli {

/// Run the command-line interface. `args` excludes the program name.
/// Records go to `out` (or the --output path); diagnostics go to `err`.
/// Returns the process exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace reportcert::cli
