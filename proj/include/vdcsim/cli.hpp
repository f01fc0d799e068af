#pragma once

// In-process command-line entry point. tools/main.cpp forwards argv here;
// tests call it directly to avoid spawning processes.

#include <ostream>
#include <string>
#include <vector>

namespace vdcsim {

// args excludes the program name. Returns the process exit code: 0 iff the
// command ran without error. Normal output goes to out, diagnostics to err.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace vdcsim
