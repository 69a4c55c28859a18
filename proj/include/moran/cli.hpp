#ifndef MORAN_CLI_HPP
#define MORAN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace moran {

// Entry point behind the `moran` binary. args excludes the program name.
// Exit codes: 0 success, 1 usage error, 2 input/consistency error (also
// audit violations), 3 estimator failure sentinel.
int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                std::ostream& err);

}  // namespace moran

#endif
