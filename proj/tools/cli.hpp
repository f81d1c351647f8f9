#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace sdcc::cli {

/// Runs one subcommand.  Exit codes: 0 success / verdict accepted, 1 verdict
/// failure (membership out, condition violated, reproduction mismatch),
/// 2 input or usage errors.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace sdcc::cli
