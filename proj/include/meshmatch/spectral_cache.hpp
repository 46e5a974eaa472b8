// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-mesh binary cache of the spectral basis: (m, k, eigenvalues,
// eigenfunctions, mass diagonal) behind a version header. A cache is only
// valid for the exact mesh content hash it was built from.

#pragma once

#include "meshmatch/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace meshmatch {

// Writes atomically (temp file + rename).
void save_spectral_cache(const std::filesystem::path& path, const SpectralBasis& basis,
                         std::uint64_t mesh_hash);

// Returns nullopt when the file is absent, carries a different version, or
// was built from different mesh content. Throws on a corrupt file.
std::optional<SpectralBasis> load_spectral_cache(const std::filesystem::path& path,
                                                 std::uint64_t mesh_hash);

}  // namespace meshmatch
