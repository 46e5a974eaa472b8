// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Discrete differential operators: lumped mass matrix, cotangent stiffness
// matrix, and area-weighted vertex normals.
//
// Sign convention: S is assembled with off-diagonal entries
// -1/2 * sum(cot(angle opposite the edge)) and diagonal minus the row sum,
// i.e. the classical FEM stiffness matrix. S is positive semidefinite and
// annihilates constants; Laplace-Beltrami eigenvalues come from
// S psi = lambda M psi with lambda >= 0.

#pragma once

#include "meshmatch/geometry.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace meshmatch {

struct MassMatrix {
    Eigen::VectorXd diagonal;  // m lumped vertex areas, all > 0

    double total_area() const { return diagonal.sum(); }
};

using StiffnessMatrix = Eigen::SparseMatrix<double>;

// m x 3 unit vectors.
using NormalField = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// Barycentric lumping: each triangle spreads one third of its area onto
// each of its vertices. Throws on a degenerate triangle, naming it.
MassMatrix mass_matrix(const Mesh& mesh);

// Cotangent stiffness with the convention documented above. Throws on a
// degenerate triangle (cotangent undefined).
StiffnessMatrix stiffness_matrix(const Mesh& mesh);

// Area-weighted average of incident triangle normals, normalized to unit
// length. Winding is taken from the stored triangle orientation. Throws if
// the accumulated normal vanishes at some vertex.
NormalField vertex_normals(const Mesh& mesh);

// Same as vertex_normals but maps a vanishing accumulation to the zero
// vector instead of throwing. Used for embeddings of heavily smoothed
// geometry, where collapsed triangles are expected and must not abort a
// matching run.
NormalField vertex_normals_or_zero(const Vertices& vertices, const Triangles& triangles);

}  // namespace meshmatch
