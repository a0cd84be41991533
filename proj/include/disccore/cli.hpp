#pragma once

#include <string>
#include <vector>

namespace disccore::cli {

// argv-style entry point (program name excluded). Returns the exit code:
// 0 iff all outputs were written and every internal check passed.
int run(const std::vector<std::string>& args);

int run(int argc, char** argv);

}  // namespace disccore::cli
