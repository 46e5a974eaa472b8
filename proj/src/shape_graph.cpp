// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/shape_graph.hpp"

#include "meshmatch/geodesic.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace meshmatch {

std::string topology_name(Topology t) {
    switch (t) {
        case Topology::Full: return "full";
        case Topology::Mst: return "mst";
        case Topology::Tsp: return "tsp";
        case Topology::Star: return "star";
    }
    return "full";
}

Topology topology_from_name(const std::string& name) {
    if (name == "full") return Topology::Full;
    if (name == "mst") return Topology::Mst;
    if (name == "tsp") return Topology::Tsp;
    if (name == "star") return Topology::Star;
    throw std::invalid_argument("unknown graph topology '" + name +
                                "' (expected full, mst, tsp or star)");
}

bool ShapeGraph::is_retained(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::find(retained_edges.begin(), retained_edges.end(), std::make_pair(a, b)) !=
           retained_edges.end();
}

void PairStore::insert(int i, int j, MatchResult result) {
    results_[{i, j}] = std::move(result);
}

bool PairStore::contains(int i, int j) const { return results_.count({i, j}) > 0; }

const MatchResult& PairStore::get(int i, int j) const {
    const auto it = results_.find({i, j});
    if (it == results_.end())
        throw std::runtime_error("pair store: missing match result for pair (" +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
    return it->second;
}

double affinity_weight(const MatchResult& result_ij, const MatchResult& result_ji,
                       const Mesh& shape_i, const Mesh& shape_j) {
    const double forward =
        match_energy(result_ij.registration, shape_j.vertices, result_ij.pi);
    const double backward =
        match_energy(result_ji.registration, shape_i.vertices, result_ji.pi);
    return std::min(forward, backward);
}

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<size_t>(b)] = a;
        return true;
    }
};

std::vector<std::pair<int, int>> kruskal_mst(const Eigen::MatrixXd& w) {
    const int n = static_cast<int>(w.rows());
    struct Edge {
        double weight;
        int a, b;
    };
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) edges.push_back({w(a, b), a, b});
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        return std::tie(x.weight, x.a, x.b) < std::tie(y.weight, y.a, y.b);
    });
    UnionFind uf(n);
    std::vector<std::pair<int, int>> picked;
    for (const Edge& e : edges) {
        if (uf.unite(e.a, e.b)) {
            picked.emplace_back(e.a, e.b);
            if (static_cast<int>(picked.size()) == n - 1) break;
        }
    }
    return picked;
}

double path_weight(const Eigen::MatrixXd& w, const std::vector<int>& order) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < order.size(); ++i) total += w(order[i], order[i + 1]);
    return total;
}

std::vector<int> canonical_direction(std::vector<int> order) {
    std::vector<int> rev(order.rbegin(), order.rend());
    return rev < order ? rev : order;
}

std::vector<int> tsp_exact(const Eigen::MatrixXd& w) {
    const int n = static_cast<int>(w.rows());
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> best;
    double best_weight = std::numeric_limits<double>::infinity();
    do {
        const double weight = path_weight(w, order);
        if (weight < best_weight) {
            best_weight = weight;
            best = canonical_direction(order);
        } else if (weight == best_weight) {
            std::vector<int> canon = canonical_direction(order);
            if (canon < best) best = std::move(canon);
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

std::vector<int> tsp_heuristic(const Eigen::MatrixXd& w) {
    const int n = static_cast<int>(w.rows());
    std::vector<int> best;
    double best_weight = std::numeric_limits<double>::infinity();

    for (int start = 0; start < n; ++start) {
        // Greedy nearest-neighbor chain.
        std::vector<int> order{start};
        std::vector<char> used(static_cast<size_t>(n), 0);
        used[static_cast<size_t>(start)] = 1;
        while (static_cast<int>(order.size()) < n) {
            const int tail = order.back();
            int next = -1;
            double next_w = std::numeric_limits<double>::infinity();
            for (int v = 0; v < n; ++v) {
                if (!used[static_cast<size_t>(v)] && w(tail, v) < next_w) {
                    next_w = w(tail, v);
                    next = v;
                }
            }
            used[static_cast<size_t>(next)] = 1;
            order.push_back(next);
        }

        // 2-opt on the open path: reverse [i, j] while it shortens the two
        // boundary edges.
        bool improved = true;
        while (improved) {
            improved = false;
            for (int i = 0; i < n - 1 && !improved; ++i) {
                for (int j = i + 1; j < n && !improved; ++j) {
                    double removed = 0.0, added = 0.0;
                    if (i > 0) {
                        removed += w(order[static_cast<size_t>(i) - 1], order[static_cast<size_t>(i)]);
                        added += w(order[static_cast<size_t>(i) - 1], order[static_cast<size_t>(j)]);
                    }
                    if (j < n - 1) {
                        removed += w(order[static_cast<size_t>(j)], order[static_cast<size_t>(j) + 1]);
                        added += w(order[static_cast<size_t>(i)], order[static_cast<size_t>(j) + 1]);
                    }
                    if (added < removed) {
                        std::reverse(order.begin() + i, order.begin() + j + 1);
                        improved = true;
                    }
                }
            }
        }

        const double weight = path_weight(w, order);
        std::vector<int> canon = canonical_direction(order);
        if (weight < best_weight || (weight == best_weight && canon < best)) {
            best_weight = weight;
            best = std::move(canon);
        }
    }
    return best;
}

}  // namespace

ShapeGraph build_graph(const Eigen::MatrixXd& weights, const std::vector<std::string>& ids,
                       Topology topology) {
    const int n = static_cast<int>(ids.size());
    if (n < 2) throw std::invalid_argument("build_graph: need at least 2 nodes");
    if (weights.rows() != n || weights.cols() != n)
        throw std::invalid_argument("build_graph: weight matrix shape does not match node count");
    if ((weights - weights.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("build_graph: weight matrix must be symmetric");
    if (weights.diagonal().cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("build_graph: weight matrix diagonal must be zero");

    ShapeGraph graph;
    graph.nodes = ids;
    graph.weights = weights;
    graph.topology = topology;

    switch (topology) {
        case Topology::Full:
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) graph.retained_edges.emplace_back(a, b);
            break;
        case Topology::Mst:
            graph.retained_edges = kruskal_mst(weights);
            break;
        case Topology::Tsp: {
            const std::vector<int> order = n <= 9 ? tsp_exact(weights) : tsp_heuristic(weights);
            for (size_t i = 0; i + 1 < order.size(); ++i) {
                int a = order[i], b = order[i + 1];
                if (a > b) std::swap(a, b);
                graph.retained_edges.emplace_back(a, b);
            }
            break;
        }
        case Topology::Star: {
            int center = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int v = 0; v < n; ++v) {
                const double incident = weights.row(v).sum();  // diagonal is zero
                if (incident < best) {
                    best = incident;
                    center = v;
                }
            }
            for (int v = 0; v < n; ++v)
                if (v != center) graph.retained_edges.emplace_back(std::min(center, v), std::max(center, v));
            break;
        }
    }
    std::sort(graph.retained_edges.begin(), graph.retained_edges.end());
    return graph;
}

ShapeGraph build_graph(const PairStore& store, const std::vector<std::string>& ids,
                       Topology topology, const std::vector<Mesh>& shapes) {
    const int n = static_cast<int>(ids.size());
    if (static_cast<int>(shapes.size()) != n)
        throw std::invalid_argument("build_graph: shape list does not match node count");
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double w = affinity_weight(store.get(i, j), store.get(j, i), shapes[static_cast<size_t>(i)],
                                             shapes[static_cast<size_t>(j)]);
            weights(i, j) = weights(j, i) = w;
        }
    }
    return build_graph(weights, ids, topology);
}

std::vector<int> shortest_path(const ShapeGraph& graph, int i, int j) {
    const int n = graph.size();
    if (i == j) throw std::invalid_argument("shortest_path: query nodes must differ");
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::invalid_argument("shortest_path: node index out of range");

    std::vector<std::vector<int>> neighbors(static_cast<size_t>(n));
    for (const auto& [a, b] : graph.retained_edges) {
        neighbors[static_cast<size_t>(a)].push_back(b);
        neighbors[static_cast<size_t>(b)].push_back(a);
    }

    // Label-correcting search keeping (distance, path) per node, with the
    // lexicographically smallest sequence breaking distance ties. Revisits
    // are excluded so zero-weight edges cannot loop.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(n), inf);
    std::vector<std::vector<int>> path(static_cast<size_t>(n));
    dist[static_cast<size_t>(i)] = 0.0;
    path[static_cast<size_t>(i)] = {i};

    bool changed = true;
    while (changed) {
        changed = false;
        for (int u = 0; u < n; ++u) {
            if (path[static_cast<size_t>(u)].empty()) continue;
            for (int v : neighbors[static_cast<size_t>(u)]) {
                const auto& pu = path[static_cast<size_t>(u)];
                if (std::find(pu.begin(), pu.end(), v) != pu.end()) continue;
                const double cand = dist[static_cast<size_t>(u)] + graph.weights(u, v);
                std::vector<int> cand_path = pu;
                cand_path.push_back(v);
                if (cand < dist[static_cast<size_t>(v)] ||
                    (cand == dist[static_cast<size_t>(v)] && cand_path < path[static_cast<size_t>(v)])) {
                    dist[static_cast<size_t>(v)] = cand;
                    path[static_cast<size_t>(v)] = std::move(cand_path);
                    changed = true;
                }
            }
        }
    }
    if (path[static_cast<size_t>(j)].empty())
        throw std::logic_error("shortest_path: target unreachable over retained edges");
    return path[static_cast<size_t>(j)];
}

Correspondence compose_maps(const std::vector<int>& path, const PairStore& store) {
    if (path.size() < 2) throw std::invalid_argument("compose_maps: path needs at least two nodes");
    Correspondence current = store.get(path[0], path[1]).pi;
    for (size_t leg = 1; leg + 1 < path.size(); ++leg) {
        const Correspondence& next = store.get(path[leg], path[leg + 1]).pi;
        for (int& t : current.target_index) {
            if (t < 0 || t >= next.size())
                throw std::runtime_error("compose_maps: map index out of range along the path");
            t = next(t);
        }
    }
    return current;
}

double cycle_consistency_score(const Eigen::Matrix<double, Eigen::Dynamic, 3>& registration,
                               const Mesh& target, const Correspondence& pi_mult) {
    return match_energy(registration, target.vertices, pi_mult);
}

MultiMatch multi_match(const ShapeGraph& graph, const PairStore& store, int i, int j,
                       const std::vector<Mesh>& shapes) {
    if (i == j) throw std::invalid_argument("multi_match: query nodes must differ");
    MultiMatch out;
    out.path = shortest_path(graph, i, j);
    out.pi = compose_maps(out.path, store);
    out.cycle_score = cycle_consistency_score(store.get(i, j).registration,
                                              shapes[static_cast<size_t>(j)], out.pi);
    return out;
}

MdsResult mds_embedding(const ShapeGraph& graph) {
    const int n = graph.size();
    if (n < 2) throw std::invalid_argument("mds_embedding: need at least 2 nodes");

    // Distances actually realized by the graph: shortest-path sums over
    // retained edges.
    std::vector<GraphEdge> edges;
    for (const auto& [a, b] : graph.retained_edges) edges.push_back({a, b, graph.weights(a, b)});
    Eigen::MatrixXd dist(n, n);
    for (int s = 0; s < n; ++s) {
        const GeodesicResult row = shortest_path_distances(n, edges, {s});
        if (row.unreachable > 0)
            throw std::runtime_error("mds_embedding: graph is disconnected over retained edges");
        dist.row(s) = row.distances.transpose();
    }

    const Eigen::MatrixXd d2 = dist.array().square();
    const Eigen::MatrixXd centering =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    const Eigen::MatrixXd gram = -0.5 * centering * d2 * centering;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (gram + gram.transpose()));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("mds_embedding: eigensolver failed");

    MdsResult result;
    result.coordinates.resize(n, 2);
    for (int axis = 0; axis < 2; ++axis) {
        double value = solver.eigenvalues()[n - 1 - axis];
        if (value < 0.0) {
            value = 0.0;
            ++result.clamped_axes;
        }
        result.coordinates.col(axis) = solver.eigenvectors().col(n - 1 - axis) * std::sqrt(value);
    }
    result.coordinates.rowwise() -= result.coordinates.colwise().mean();

    // Deterministic orientation: node 0 (or the first node with a nonzero
    // entry) lands on the nonnegative side of each axis.
    for (int axis = 0; axis < 2; ++axis) {
        for (int v = 0; v < n; ++v) {
            if (result.coordinates(v, axis) != 0.0) {
                if (result.coordinates(v, axis) < 0.0) result.coordinates.col(axis) *= -1.0;
                break;
            }
        }
    }
    return result;
}

void save_graph_json(const ShapeGraph& graph, const MdsResult& mds,
                     const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["nodes"] = graph.nodes;
    doc["topology"] = topology_name(graph.topology);
    auto weights = nlohmann::json::array();
    for (int a = 0; a < graph.size(); ++a) {
        auto row = nlohmann::json::array();
        for (int b = 0; b < graph.size(); ++b) row.push_back(graph.weights(a, b));
        weights.push_back(row);
    }
    doc["weights"] = weights;
    auto edges = nlohmann::json::array();
    for (const auto& [a, b] : graph.retained_edges) edges.push_back({a, b});
    doc["retained_edges"] = edges;
    auto coords = nlohmann::json::array();
    for (int v = 0; v < mds.coordinates.rows(); ++v)
        coords.push_back({mds.coordinates(v, 0), mds.coordinates(v, 1)});
    doc["mds"] = coords;

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
        out << doc.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

ShapeGraph load_graph_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open graph JSON");
    nlohmann::json doc;
    in >> doc;

    ShapeGraph graph;
    graph.nodes = doc.at("nodes").get<std::vector<std::string>>();
    graph.topology = topology_from_name(doc.at("topology").get<std::string>());
    const int n = graph.size();
    graph.weights.resize(n, n);
    const auto& weights = doc.at("weights");
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) graph.weights(a, b) = weights.at(a).at(b).get<double>();
    for (const auto& edge : doc.at("retained_edges"))
        graph.retained_edges.emplace_back(edge.at(0).get<int>(), edge.at(1).get<int>());
    return graph;
}

}  // namespace meshmatch
