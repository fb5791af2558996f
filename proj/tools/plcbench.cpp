// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "plcbench/bench/cli.hpp"

int main(int argc, char** argv) { return plcbench::bench::cli_main(argc, argv, std::cout, std::cerr); }
