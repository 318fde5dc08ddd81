#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace bridgekit {

/*
 * Entry point of the bridgekit command line. args excludes the program
 * name. Returns 0 on success, 1 on a runtime failure (including any failed
 * verification check) and 2 on argument errors.
 */
int run_cli(const std::vector<std::string> &args, std::ostream &out = std::cout,
            std::ostream &err = std::cerr);

} // namespace bridgekit
