#include <string>
#include <vector>

#include "fr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fr::cli::run(std::move(args));
}
