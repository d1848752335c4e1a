// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "irsofdm/cli.hpp"

int main(int argc, char** argv) { return irsofdm::cli_main(argc, argv, std::cout, std::cerr); }
