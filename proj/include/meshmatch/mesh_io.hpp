// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// OFF / PLY readers and a PLY writer. PLY is supported in ASCII and
// binary_little_endian flavors; anything else is rejected with a clear
// message. Parse errors carry a line (ASCII) or byte (binary) offset.

#pragma once

#include "meshmatch/geometry.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>

namespace meshmatch {

// Per-vertex 8-bit RGB, one row per vertex.
using VertexColors = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3>;

// Loads an OFF or PLY mesh (decided by extension). The mesh id is the
// filename stem. Vertex and face order are preserved from the file; the
// result is validated (see validate_mesh).
Mesh load_mesh(const std::filesystem::path& path);

// Same parsing, no validation. For derived artifacts (e.g. registrations)
// that may legitimately contain collapsed triangles.
Mesh load_mesh_unchecked(const std::filesystem::path& path);

// Writes a binary_little_endian PLY, with optional per-vertex colors.
// Positions are written as double, so a save/load round trip is exact.
void save_ply(const Mesh& mesh, const std::filesystem::path& path,
              const std::optional<VertexColors>& colors = std::nullopt);

}  // namespace meshmatch
