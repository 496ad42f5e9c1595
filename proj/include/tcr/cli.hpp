#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tcr {

// args[0] is the program name. Returns 0 on success or a true verdict, 1 on
// a negative verdict and 2 on usage or input errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tcr
