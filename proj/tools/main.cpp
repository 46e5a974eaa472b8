// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/cli.hpp"

int main(int argc, char** argv) { return meshmatch::cli_main(argc, argv); }
