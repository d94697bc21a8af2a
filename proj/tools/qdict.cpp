// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "qdict/cli.hpp"

int main(int argc, char** argv) { return qdict::cli::run(argc, argv, std::cout, std::cerr); }
