#pragma once

#include <iostream>

namespace sitesel::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_physics = 3;
inline constexpr int exit_numeric = 4;

int run_cli(int argc, const char* const* argv, std::ostream& log = std::cout,
            std::ostream& err = std::cerr);

}  // namespace sitesel::cli
