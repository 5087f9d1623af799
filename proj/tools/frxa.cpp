#include <string>
#include <vector>

#include "frxa/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return frxa::cli::run(args);
}
