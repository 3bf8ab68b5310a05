#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

namespace hpcpm::cli {

/// Set from the SIGINT handler; stops `observe --live`.
std::atomic<bool>& interrupt_flag();

/// Entry point shared by the hpcpm binary and the tests. `args` excludes the
/// program name. Diagnostics go to `err` only.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hpcpm::cli
