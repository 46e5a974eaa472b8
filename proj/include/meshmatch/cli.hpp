// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace meshmatch {

// Entry point of the meshmatch tool, callable in-process for tests.
// Returns 0 on success, 2 on validation failure, 1 on internal error.
int cli_main(int argc, const char* const* argv);

}  // namespace meshmatch
