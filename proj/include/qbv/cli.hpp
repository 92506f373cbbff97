#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qbv {

// Full command-line entry point, factored out of main() so tests can invoke
// it in-process. `args` excludes the program name. Writes results to `out`
// and diagnostics to `err`.
//
// Exit-status contract (total): 0 = PASS (or the command completed),
// 1 = statistical FAIL verdict, 2 = usage or operational error.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace qbv
