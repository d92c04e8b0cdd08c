#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fuchswave {

// exit codes: 0 every verdict passes, 2 some verdict fails, 1 error
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fuchswave
