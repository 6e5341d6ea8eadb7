#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace cssdual {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIdentityFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResource = 3;

// Full command-line entry point (args exclude the program name).
// Every command is deterministic given its flags; all randomness flows
// from --seed and --threads never changes output bytes.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace cssdual
