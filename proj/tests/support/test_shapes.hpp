// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic mesh generators shared by the test suites.

#pragma once

#include "meshmatch/geometry.hpp"

#include <cstdint>
#include <vector>

namespace meshmatch::testing {

// One triangle spanning the given corners.
Mesh single_triangle(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c);

// Unit right triangle in z = 0: (0,0,0), (1,0,0), (0,1,0).
Mesh unit_right_triangle();

// Equilateral triangle with unit side length in z = 0.
Mesh unit_equilateral_triangle();

// Unit square split along one diagonal into two triangles.
Mesh unit_square();

// Regular tetrahedron (4 vertices).
Mesh tetrahedron();

// Octahedron with unit-length axes (6 vertices, 8 faces).
Mesh octahedron();

// Icosphere: subdivided icosahedron projected to the unit sphere.
// subdivisions = 4 gives 2562 vertices.
Mesh icosphere(int subdivisions);

// Triangulated jittered height-field grid; always a valid connected mesh.
Mesh random_grid_mesh(int nx, int ny, std::uint32_t seed, double jitter = 0.15);

// Open cylinder of `n_axial` rings with `n_radial` samples each, bent by
// `bend` radians (arc in the x-z plane) and twisted by `twist` radians over
// its length. Vertex order is identical across parameter choices, so the
// identity map is ground truth between any two poses.
Mesh cylinder(int n_axial, int n_radial, double length, double radius, double bend, double twist,
              const std::string& id);

// Progressive bend+twist family of `count` poses ordered from the straight
// cylinder to the most deformed one. The seed perturbs the per-pose
// deformation amounts.
std::vector<Mesh> cylinder_family(int count, std::uint32_t seed, int n_axial = 22,
                                  int n_radial = 26);

}  // namespace meshmatch::testing
