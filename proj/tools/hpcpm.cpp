#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "hpcpm/cli.h"

namespace {

extern "C" void on_interrupt(int) { hpcpm::cli::interrupt_flag() = true; }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  std::vector<std::string> args(argv + 1, argv + argc);
  return hpcpm::cli::run(args, std::cout, std::cerr);
}
