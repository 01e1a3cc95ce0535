#pragma once

#include <ostream>

namespace hefs {

/// Command-line entry point. Returns 0 on success, 2 on configuration errors
/// and 1 on data errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hefs
