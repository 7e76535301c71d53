// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "linetrace/cli/commands.hpp"

int main(int argc, char** argv) { return linetrace::cli::run(argc, argv, std::cout, std::cerr); }
