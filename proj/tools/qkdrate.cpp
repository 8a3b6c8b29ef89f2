// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "qkd/cli.hpp"

int main(int argc, char** argv) { return qkd::cli::run(argc, argv, std::cout, std::cerr); }
