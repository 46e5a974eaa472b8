// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace meshmatch {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace meshmatch
