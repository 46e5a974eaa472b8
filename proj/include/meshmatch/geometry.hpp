// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Triangle mesh container and normalization.
//
// Conventions used across meshmatch:
// - Vertices are stored one per row (m x 3), triangles as 0-based index
//   triples (t x 3) with counter-clockwise winding for outward normals.
// - Meshes are validated on construction: indices in range, no repeated
//   vertex inside a triangle, no isolated vertices, no degenerate faces.
// - After preprocess() all shapes live at a common scale
//   (sqrt(area) = 2/3, vertex mean at the origin), so downstream energies
//   are comparable across a collection.

#pragma once

#include <Eigen/Core>

#include <string>

namespace meshmatch {

using Vertices = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Triangles = Eigen::Matrix<int, Eigen::Dynamic, 3>;

struct Mesh {
    Vertices vertices;    // m x 3 positions
    Triangles triangles;  // t x 3 vertex indices, CCW winding
    std::string id;       // stable shape identifier (filename stem)

    int num_vertices() const { return static_cast<int>(vertices.rows()); }
    int num_triangles() const { return static_cast<int>(triangles.rows()); }
};

// Throws std::runtime_error naming the offending triangle if any index is
// out of range, a triangle repeats a vertex, the triangle set is empty,
// some vertex is isolated, or a triangle is degenerate
// (area < 1e-12 * total area).
void validate_mesh(const Mesh& mesh);

// Area of one triangle via the cross product.
double triangle_area(const Mesh& mesh, int t);

// Sum of all triangle areas.
double total_area(const Mesh& mesh);

// Rescales so that sqrt(total area) = 2/3 and recenters the vertex mean at
// the origin. Triangles are untouched. Throws on zero-area input.
Mesh preprocess(const Mesh& mesh);

}  // namespace meshmatch
