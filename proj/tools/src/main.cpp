// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "pulsectl/cli.hpp"

int main(int argc, char** argv) { return pulsectl::cli::dispatch(argc, argv, std::cout, std::cerr); }
