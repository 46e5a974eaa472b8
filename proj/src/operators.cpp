// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/operators.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace meshmatch {

namespace {

[[noreturn]] void degenerate(const Mesh& mesh, int t) {
    throw std::runtime_error("mesh '" + mesh.id + "': triangle " + std::to_string(t) +
                             " is degenerate");
}

}  // namespace

MassMatrix mass_matrix(const Mesh& mesh) {
    MassMatrix mass;
    mass.diagonal = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double area = triangle_area(mesh, t);
        if (!(area > 0.0)) degenerate(mesh, t);
        for (int c = 0; c < 3; ++c) mass.diagonal[mesh.triangles(t, c)] += area / 3.0;
    }
    return mass;
}

StiffnessMatrix stiffness_matrix(const Mesh& mesh) {
    const int m = mesh.num_vertices();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<size_t>(mesh.num_triangles()) * 12);

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::Vector3i tri = mesh.triangles.row(t);
        for (int c = 0; c < 3; ++c) {
            // Angle at vertex `k`, opposite edge (i, j).
            const int k = tri[c];
            const int i = tri[(c + 1) % 3];
            const int j = tri[(c + 2) % 3];
            const Eigen::Vector3d u = mesh.vertices.row(i) - mesh.vertices.row(k);
            const Eigen::Vector3d v = mesh.vertices.row(j) - mesh.vertices.row(k);
            const double cross = u.cross(v).norm();
            if (!(cross > 0.0)) degenerate(mesh, t);
            const double half_cot = 0.5 * u.dot(v) / cross;
            entries.emplace_back(i, j, -half_cot);
            entries.emplace_back(j, i, -half_cot);
            entries.emplace_back(i, i, half_cot);
            entries.emplace_back(j, j, half_cot);
        }
    }

    StiffnessMatrix stiffness(m, m);
    stiffness.setFromTriplets(entries.begin(), entries.end());
    stiffness.makeCompressed();
    return stiffness;
}

NormalField vertex_normals_or_zero(const Vertices& vertices, const Triangles& triangles) {
    NormalField normals = NormalField::Zero(vertices.rows(), 3);
    for (int t = 0; t < triangles.rows(); ++t) {
        const Eigen::Vector3d a = vertices.row(triangles(t, 0));
        const Eigen::Vector3d b = vertices.row(triangles(t, 1));
        const Eigen::Vector3d c = vertices.row(triangles(t, 2));
        // Cross product length is twice the area, so this is area weighting.
        const Eigen::Vector3d weighted = (b - a).cross(c - a);
        for (int cidx = 0; cidx < 3; ++cidx) normals.row(triangles(t, cidx)) += weighted.transpose();
    }
    for (int v = 0; v < vertices.rows(); ++v) {
        const double len = normals.row(v).norm();
        if (len > 0.0) normals.row(v) /= len;
        else normals.row(v).setZero();
    }
    return normals;
}

NormalField vertex_normals(const Mesh& mesh) {
    NormalField normals = vertex_normals_or_zero(mesh.vertices, mesh.triangles);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (normals.row(v).norm() == 0.0)
            throw std::runtime_error("mesh '" + mesh.id + "': accumulated normal vanishes at vertex " +
                                     std::to_string(v));
    }
    return normals;
}

}  // namespace meshmatch
