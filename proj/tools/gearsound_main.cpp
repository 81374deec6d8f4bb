#include <string>
#include <vector>

#include "gearsound/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gearsound::run_command(args);
}
