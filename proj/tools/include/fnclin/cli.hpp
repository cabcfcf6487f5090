#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fnclin::cli {

/// Exit codes: 0 success or help, 1 usage/validation error, 2 runtime or
/// numerical failure.
int dispatch(int argc, char** argv);

/// `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fnclin::cli
