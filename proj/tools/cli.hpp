#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace affine {

/// Entry point of the affinelab command line. args excludes the program name.
/// Returns 0 on success, 1 on a failed verification or a library error, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affine
