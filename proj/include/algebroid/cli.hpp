// Command-line front end. Every subcommand prints one JSON report on `out`;
// human-readable notes and usage text go to `err`.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace algebroid::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kInconclusive = 2, kInputError = 3 };

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace algebroid::cli
