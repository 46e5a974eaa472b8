// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Affinity graph over a shape collection: topology selection (full / MST /
// TSP path / star), shortest-path map propagation, map composition, cycle
// consistency scoring, and 2D MDS node embedding.

#pragma once

#include "meshmatch/matching.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace meshmatch {

enum class Topology { Full, Mst, Tsp, Star };

std::string topology_name(Topology t);
Topology topology_from_name(const std::string& name);

struct ShapeGraph {
    std::vector<std::string> nodes;          // shape ids, index = node id
    Eigen::MatrixXd weights;                 // symmetric, zero diagonal
    Topology topology = Topology::Full;
    std::vector<std::pair<int, int>> retained_edges;  // a < b

    int size() const { return static_cast<int>(nodes.size()); }
    bool is_retained(int a, int b) const;
};

// Lookup from ordered node pair to its MatchResult. The graph stage needs
// both orientations of every unordered pair.
class PairStore {
public:
    void insert(int i, int j, MatchResult result);
    bool contains(int i, int j) const;
    const MatchResult& get(int i, int j) const;  // throws when missing

private:
    std::map<std::pair<int, int>, MatchResult> results_;
};

// Symmetric affinity: the smaller of the two directed matching energies
// between registered source vertices and raw target vertices.
double affinity_weight(const MatchResult& result_ij, const MatchResult& result_ji,
                       const Mesh& shape_i, const Mesh& shape_j);

// Builds the graph for the requested topology. Full retains every edge.
// MST is Kruskal over the weights. TSP is the minimal-weight Hamiltonian
// path: exact enumeration for N <= 9, otherwise nearest-neighbor from every
// start improved by 2-opt. Star picks the node with the smallest incident
// weight sum as center.
ShapeGraph build_graph(const Eigen::MatrixXd& weights, const std::vector<std::string>& ids,
                       Topology topology);

// Convenience overload that derives the weight matrix from a PairStore.
ShapeGraph build_graph(const PairStore& store, const std::vector<std::string>& ids,
                       Topology topology, const std::vector<Mesh>& shapes);

// Minimal-total-weight node sequence from i to j over retained edges; ties
// broken by the lexicographically smallest sequence.
std::vector<int> shortest_path(const ShapeGraph& graph, int i, int j);

// Chains the stored pairwise maps along a node path.
Correspondence compose_maps(const std::vector<int>& path, const PairStore& store);

// E_match between a pairwise registration and the target vertices under a
// (typically multi-hop) correspondence.
double cycle_consistency_score(const Eigen::Matrix<double, Eigen::Dynamic, 3>& registration,
                               const Mesh& target, const Correspondence& pi_mult);

struct MultiMatch {
    std::vector<int> path;  // (i, s1, ..., j)
    Correspondence pi;
    double cycle_score = 0.0;
};

// shortest_path + compose_maps + cycle_consistency_score in one query.
// The cycle score compares the direct pair's registration against the
// propagated map, which is exactly what couples the two stages.
MultiMatch multi_match(const ShapeGraph& graph, const PairStore& store, int i, int j,
                       const std::vector<Mesh>& shapes);

// Classical MDS of the graph's shortest-path distance matrix, top two
// eigenpairs. Output is centered; each axis is flipped so node 0 (falling
// back to the first nonzero node) sits on the nonnegative side. A negative
// top eigenvalue is clamped to zero and counted in `clamped_axes`.
struct MdsResult {
    Eigen::Matrix<double, Eigen::Dynamic, 2> coordinates;
    int clamped_axes = 0;
};

MdsResult mds_embedding(const ShapeGraph& graph);

// Human-readable JSON round trip: node ids, topology, dense weights,
// retained edges, MDS coordinates.
void save_graph_json(const ShapeGraph& graph, const MdsResult& mds,
                     const std::filesystem::path& path);
ShapeGraph load_graph_json(const std::filesystem::path& path);

}  // namespace meshmatch
