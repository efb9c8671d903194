#include <string>
#include <vector>

#include "semeq/cli.hpp"

int main(int argc, char** argv) {
  return semeq::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
