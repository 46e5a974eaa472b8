// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/geometry.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace meshmatch {

double triangle_area(const Mesh& mesh, int t) {
    const Eigen::Vector3d a = mesh.vertices.row(mesh.triangles(t, 0));
    const Eigen::Vector3d b = mesh.vertices.row(mesh.triangles(t, 1));
    const Eigen::Vector3d c = mesh.vertices.row(mesh.triangles(t, 2));
    return 0.5 * (b - a).cross(c - a).norm();
}

double total_area(const Mesh& mesh) {
    double area = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) area += triangle_area(mesh, t);
    return area;
}

void validate_mesh(const Mesh& mesh) {
    const int m = mesh.num_vertices();
    const int nt = mesh.num_triangles();
    if (nt == 0) throw std::runtime_error("mesh '" + mesh.id + "': triangle set is empty");

    std::vector<char> referenced(static_cast<size_t>(m), 0);
    for (int t = 0; t < nt; ++t) {
        const int i = mesh.triangles(t, 0);
        const int j = mesh.triangles(t, 1);
        const int k = mesh.triangles(t, 2);
        for (int idx : {i, j, k}) {
            if (idx < 0 || idx >= m)
                throw std::runtime_error("mesh '" + mesh.id + "': triangle " + std::to_string(t) +
                                         " references vertex " + std::to_string(idx) +
                                         " outside [0, " + std::to_string(m) + ")");
        }
        if (i == j || j == k || i == k)
            throw std::runtime_error("mesh '" + mesh.id + "': triangle " + std::to_string(t) +
                                     " repeats a vertex index");
        referenced[static_cast<size_t>(i)] = referenced[static_cast<size_t>(j)] =
            referenced[static_cast<size_t>(k)] = 1;
    }
    for (int v = 0; v < m; ++v) {
        if (!referenced[static_cast<size_t>(v)])
            throw std::runtime_error("mesh '" + mesh.id + "': vertex " + std::to_string(v) +
                                     " is isolated (not referenced by any triangle)");
    }

    // Degenerate faces are rejected rather than repaired.
    const double area = total_area(mesh);
    for (int t = 0; t < nt; ++t) {
        if (triangle_area(mesh, t) < 1e-12 * area)
            throw std::runtime_error("mesh '" + mesh.id + "': triangle " + std::to_string(t) +
                                     " is degenerate (area below 1e-12 of total)");
    }
}

Mesh preprocess(const Mesh& mesh) {
    const double area = total_area(mesh);
    if (!(area > 0.0)) throw std::runtime_error("mesh '" + mesh.id + "': zero surface area");

    Mesh out = mesh;
    const Eigen::RowVector3d mean = out.vertices.colwise().mean();
    out.vertices.rowwise() -= mean;
    const double scale = (2.0 / 3.0) / std::sqrt(area);
    out.vertices *= scale;
    return out;
}

}  // namespace meshmatch
