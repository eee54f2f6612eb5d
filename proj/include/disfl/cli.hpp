#pragma once

#include <iosfwd>

namespace disfl {

// Entry point of the disfl command-line tool. Returns the process exit
// status: 0 on success, 1 on data errors, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace disfl
