#include <iostream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "remest/cli/commands.hpp"

int main(int argc, char** argv) {
  // Diagnostics go to stderr so stdout stays machine-readable.
  spdlog::set_default_logger(spdlog::stderr_logger_st("remest"));
  return remest::cli::run_cli(argc, argv, std::cout, std::cerr);
}
