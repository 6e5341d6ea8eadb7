#include <string>
#include <vector>

#include "cssdual/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cssdual::run_cli(args);
}
