#pragma once

#include <string>
#include <vector>

namespace poserefer::cli {

// Runs one `poserefer` command line. Returns the process exit code; errors are
// reported on stderr.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace poserefer::cli
