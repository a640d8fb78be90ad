#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amentropy {

// Front-end dispatch. `args` excludes the program name. Exit codes: 0 on
// success, 1 when a requested check suite reports failures, 2 on parse or
// validation errors, 3 when a computation refuses an enumeration or
// certification bound.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace amentropy
