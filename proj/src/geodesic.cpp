// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/geodesic.hpp"

#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace meshmatch {

std::vector<GraphEdge> mesh_edges(const Mesh& mesh) {
    std::unordered_set<std::int64_t> seen;
    std::vector<GraphEdge> edges;
    edges.reserve(static_cast<size_t>(mesh.num_triangles()) * 3);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int c = 0; c < 3; ++c) {
            int a = mesh.triangles(t, c);
            int b = mesh.triangles(t, (c + 1) % 3);
            if (a > b) std::swap(a, b);
            const std::int64_t key = static_cast<std::int64_t>(a) * mesh.num_vertices() + b;
            if (!seen.insert(key).second) continue;
            edges.push_back({a, b, (mesh.vertices.row(a) - mesh.vertices.row(b)).norm()});
        }
    }
    return edges;
}

GeodesicResult shortest_path_distances(int num_vertices, const std::vector<GraphEdge>& edges,
                                       const std::vector<int>& sources) {
    if (sources.empty()) throw std::invalid_argument("shortest_path_distances: empty source set");
    for (int s : sources)
        if (s < 0 || s >= num_vertices)
            throw std::invalid_argument("shortest_path_distances: source index out of range");

    // CSR-style adjacency.
    std::vector<int> degree(static_cast<size_t>(num_vertices), 0);
    for (const GraphEdge& e : edges) {
        ++degree[static_cast<size_t>(e.a)];
        ++degree[static_cast<size_t>(e.b)];
    }
    std::vector<int> offset(static_cast<size_t>(num_vertices) + 1, 0);
    for (int v = 0; v < num_vertices; ++v) offset[static_cast<size_t>(v) + 1] = offset[static_cast<size_t>(v)] + degree[static_cast<size_t>(v)];
    std::vector<std::pair<int, double>> adj(static_cast<size_t>(offset.back()));
    std::vector<int> cursor(offset.begin(), offset.end() - 1);
    for (const GraphEdge& e : edges) {
        adj[static_cast<size_t>(cursor[static_cast<size_t>(e.a)]++)] = {e.b, e.length};
        adj[static_cast<size_t>(cursor[static_cast<size_t>(e.b)]++)] = {e.a, e.length};
    }

    const double inf = std::numeric_limits<double>::infinity();
    GeodesicResult result;
    result.distances = Eigen::VectorXd::Constant(num_vertices, inf);

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    for (int s : sources) {
        result.distances[s] = 0.0;
        queue.push({0.0, s});
    }
    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (d > result.distances[v]) continue;
        for (int e = offset[static_cast<size_t>(v)]; e < offset[static_cast<size_t>(v) + 1]; ++e) {
            const auto [w, len] = adj[static_cast<size_t>(e)];
            const double nd = d + len;
            if (nd < result.distances[w]) {
                result.distances[w] = nd;
                queue.push({nd, w});
            }
        }
    }
    for (int v = 0; v < num_vertices; ++v)
        if (result.distances[v] == inf) ++result.unreachable;
    return result;
}

GeodesicResult geodesic_distances(const Mesh& mesh, const std::vector<int>& sources) {
    return shortest_path_distances(mesh.num_vertices(), mesh_edges(mesh), sources);
}

}  // namespace meshmatch
