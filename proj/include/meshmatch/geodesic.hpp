// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Geodesic distances approximated by exact Dijkstra on the edge graph with
// Euclidean edge lengths. This over-estimates true polyhedral geodesics
// (paths are restricted to mesh edges); the bias is acceptable for the
// correspondence-error protocol used here.

#pragma once

#include "meshmatch/geometry.hpp"

#include <Eigen/Core>

#include <vector>

namespace meshmatch {

struct GeodesicResult {
    Eigen::VectorXd distances;  // +inf where unreachable
    int unreachable = 0;        // number of vertices not connected to any source
};

// Weighted undirected edge for the generic solver below.
struct GraphEdge {
    int a = 0;
    int b = 0;
    double length = 0.0;
};

// Multi-source Dijkstra over an explicit edge list.
GeodesicResult shortest_path_distances(int num_vertices, const std::vector<GraphEdge>& edges,
                                       const std::vector<int>& sources);

// Multi-source Dijkstra over the mesh edge graph. Sources must be non-empty
// and in range.
GeodesicResult geodesic_distances(const Mesh& mesh, const std::vector<int>& sources);

// Unique undirected edges of the triangulation with Euclidean lengths.
std::vector<GraphEdge> mesh_edges(const Mesh& mesh);

}  // namespace meshmatch
