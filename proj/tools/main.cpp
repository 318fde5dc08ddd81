#include <string>
#include <vector>

#include "bridgekit/cli.hpp"

int main(int argc, char **argv) {
  return bridgekit::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
