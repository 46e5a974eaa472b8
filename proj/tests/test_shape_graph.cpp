// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meshmatch/shape_graph.hpp"

#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "support/test_shapes.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <random>

using namespace meshmatch;

namespace {

Eigen::MatrixXd symmetric_weights(const std::vector<double>& upper, int n) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    size_t idx = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) w(a, b) = w(b, a) = upper[idx++];
    return w;
}

std::vector<std::string> node_ids(int n) {
    std::vector<std::string> ids;
    for (int v = 0; v < n; ++v) ids.push_back("shape" + std::to_string(v));
    return ids;
}

Eigen::MatrixXd random_weights(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> unit(0.05, 2.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) w(a, b) = w(b, a) = unit(rng);
    return w;
}

Correspondence make_corr(std::initializer_list<int> targets) {
    Correspondence corr;
    corr.target_index.assign(targets.begin(), targets.end());
    return corr;
}

// A MatchResult whose registration misses the target vertices by a squared
// total of `energy` under the identity assignment.
MatchResult synthetic_result(const Mesh& source, const Mesh& target, double energy) {
    MatchResult result;
    result.pi = make_corr({});
    result.pi.target_index.resize(static_cast<size_t>(source.num_vertices()));
    for (int i = 0; i < source.num_vertices(); ++i) result.pi.target_index[static_cast<size_t>(i)] = i;
    result.registration = target.vertices;
    result.registration(0, 0) += std::sqrt(energy);
    return result;
}

}  // namespace

TEST_CASE("affinity weight of a perfectly registered self-pair vanishes") {
    const Mesh mesh = testing::unit_square();
    MatchResult perfect;
    perfect.pi = make_corr({0, 1, 2, 3});
    perfect.registration = mesh.vertices;
    CHECK(affinity_weight(perfect, perfect, mesh, mesh) == 0.0);
}

TEST_CASE("affinity weight takes the smaller directed energy") {
    const Mesh a = testing::unit_square();
    const Mesh b = testing::unit_square();
    const MatchResult ij = synthetic_result(a, b, 2.0);
    const MatchResult ji = synthetic_result(b, a, 3.0);
    CHECK(affinity_weight(ij, ji, a, b) == doctest::Approx(2.0).epsilon(1e-12));
    // Swapping the orientations swaps nothing: still the minimum.
    CHECK(affinity_weight(ji, ij, b, a) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("affinity weight equals a direct energy evaluation") {
    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    const Mesh a = testing::random_grid_mesh(3, 3, 1);
    const Mesh b = testing::random_grid_mesh(3, 3, 2);
    MatchResult ij, ji;
    ij.registration = a.vertices;
    ji.registration = b.vertices;
    for (int i = 0; i < ij.registration.size(); ++i) ij.registration.data()[i] += 0.1 * gauss(rng);
    for (int i = 0; i < ji.registration.size(); ++i) ji.registration.data()[i] += 0.1 * gauss(rng);
    std::uniform_int_distribution<int> pick(0, 8);
    for (int i = 0; i < 9; ++i) {
        ij.pi.target_index.push_back(pick(rng));
        ji.pi.target_index.push_back(pick(rng));
    }

    double forward = 0.0, backward = 0.0;
    for (int i = 0; i < 9; ++i) {
        forward += (ij.registration.row(i) - b.vertices.row(ij.pi(i))).squaredNorm();
        backward += (ji.registration.row(i) - a.vertices.row(ji.pi(i))).squaredNorm();
    }
    CHECK(affinity_weight(ij, ji, a, b) == doctest::Approx(std::min(forward, backward)).epsilon(1e-12));
}

TEST_CASE("three-node graphs match the enumerated optima") {
    // w12 = 1, w13 = 2, w23 = 3 (nodes 0, 1, 2).
    const Eigen::MatrixXd w = symmetric_weights({1, 2, 3}, 3);

    const ShapeGraph mst = build_graph(w, node_ids(3), Topology::Mst);
    REQUIRE(mst.retained_edges.size() == 2);
    CHECK(mst.is_retained(0, 1));
    CHECK(mst.is_retained(0, 2));
    CHECK(testing::brute_force_mst_weight(w) == doctest::Approx(3.0));

    const ShapeGraph star = build_graph(w, node_ids(3), Topology::Star);
    // Incident sums: node0 = 3, node1 = 4, node2 = 5.
    CHECK(star.is_retained(0, 1));
    CHECK(star.is_retained(0, 2));
    CHECK_FALSE(star.is_retained(1, 2));

    const ShapeGraph tsp = build_graph(w, node_ids(3), Topology::Tsp);
    // Path 2-0-1 with total 3 is optimal among the three Hamiltonian paths.
    CHECK(tsp.is_retained(0, 2));
    CHECK(tsp.is_retained(0, 1));
    CHECK_FALSE(tsp.is_retained(1, 2));

    const ShapeGraph full = build_graph(w, node_ids(3), Topology::Full);
    CHECK(full.retained_edges.size() == 3);
}

TEST_CASE("sparse topologies keep exactly N-1 edges and span the nodes") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + trial % 5;
        const Eigen::MatrixXd w = random_weights(n, rng);
        for (Topology topo : {Topology::Mst, Topology::Tsp, Topology::Star}) {
            const ShapeGraph graph = build_graph(w, node_ids(n), topo);
            CHECK(static_cast<int>(graph.retained_edges.size()) == n - 1);
            // Spanning: every node reachable from node 0.
            for (int v = 1; v < n; ++v) CHECK_NOTHROW(shortest_path(graph, 0, v));
        }
    }
}

TEST_CASE("MST total weight beats every spanning tree by brute force") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 5;  // up to 7
        const Eigen::MatrixXd w = random_weights(n, rng);
        const ShapeGraph mst = build_graph(w, node_ids(n), Topology::Mst);
        double total = 0.0;
        for (const auto& [a, b] : mst.retained_edges) total += w(a, b);
        CHECK(total == doctest::Approx(testing::brute_force_mst_weight(w)).epsilon(1e-12));
    }
}

TEST_CASE("exact TSP equals the permutation oracle, heuristic stays feasible") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 4 + trial % 4;  // exact regime
        const Eigen::MatrixXd w = random_weights(n, rng);
        const ShapeGraph tsp = build_graph(w, node_ids(n), Topology::Tsp);
        double total = 0.0;
        for (const auto& [a, b] : tsp.retained_edges) total += w(a, b);
        CHECK(total == doctest::Approx(testing::brute_force_tsp_weight(w)).epsilon(1e-12));
    }

    // Above the exact cutoff the 2-opt heuristic must still produce a
    // Hamiltonian path no better than optimal (checked on n = 10 against
    // the oracle, which is still feasible to enumerate).
    const int n = 10;
    const Eigen::MatrixXd w = random_weights(n, rng);
    const ShapeGraph tsp = build_graph(w, node_ids(n), Topology::Tsp);
    CHECK(static_cast<int>(tsp.retained_edges.size()) == n - 1);
    double total = 0.0;
    for (const auto& [a, b] : tsp.retained_edges) total += w(a, b);
    CHECK(total >= testing::brute_force_tsp_weight(w) - 1e-12);
}

TEST_CASE("star center minimizes the incident sum") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 5;
        const Eigen::MatrixXd w = random_weights(n, rng);
        const ShapeGraph star = build_graph(w, node_ids(n), Topology::Star);
        const int center = testing::brute_force_star_center(w);
        for (int v = 0; v < n; ++v)
            if (v != center) CHECK(star.is_retained(std::min(center, v), std::max(center, v)));
    }
}

TEST_CASE("direct edge wins when it undercuts every detour") {
    const Eigen::MatrixXd w = symmetric_weights({0.1, 5, 5}, 3);
    CHECK(shortest_path(build_graph(w, node_ids(3), Topology::Full), 0, 1) ==
          std::vector<int>{0, 1});
}

TEST_CASE("two-hop detour wins when the direct edge is heavy") {
    // w01 = 5, w02 = 1, w21 = 1.
    const Eigen::MatrixXd w = symmetric_weights({5, 1, 1}, 3);
    CHECK(shortest_path(build_graph(w, node_ids(3), Topology::Full), 0, 1) ==
          std::vector<int>{0, 2, 1});
}

TEST_CASE("shortest paths match exhaustive enumeration on random graphs") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6;
        const Eigen::MatrixXd w = random_weights(n, rng);
        const ShapeGraph full = build_graph(w, node_ids(n), Topology::Full);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const auto oracle =
                    testing::brute_force_shortest_path(n, full.retained_edges, w, i, j);
                REQUIRE(oracle.has_value());
                CHECK(shortest_path(full, i, j) == *oracle);
            }
        }
    }
}

TEST_CASE("equal-weight paths resolve to the lexicographically smallest") {
    // All edges weight 1: many equal paths; 0 -> 3 must pick (0, 3)... and
    // with the direct edge removed, (0, 1, 3) beats (0, 2, 3).
    Eigen::MatrixXd w = symmetric_weights({1, 1, 1, 1, 1, 1}, 4);
    ShapeGraph graph = build_graph(w, node_ids(4), Topology::Full);
    CHECK(shortest_path(graph, 0, 3) == std::vector<int>{0, 3});

    graph.retained_edges.clear();
    for (const auto edge : {std::pair{0, 1}, {0, 2}, {1, 3}, {2, 3}})
        graph.retained_edges.push_back(edge);
    CHECK(shortest_path(graph, 0, 3) == std::vector<int>{0, 1, 3});
}

TEST_CASE("identical query nodes are rejected") {
    const Eigen::MatrixXd w = symmetric_weights({1, 2, 3}, 3);
    const ShapeGraph graph = build_graph(w, node_ids(3), Topology::Full);
    CHECK_THROWS_AS(shortest_path(graph, 1, 1), std::invalid_argument);
}

TEST_CASE("composing along a single edge returns the stored map") {
    PairStore store;
    MatchResult r;
    r.pi = make_corr({2, 0, 1});
    store.insert(0, 1, r);
    CHECK(compose_maps({0, 1}, store).target_index == std::vector<int>{2, 0, 1});
}

TEST_CASE("two swaps compose to the identity") {
    PairStore store;
    MatchResult swap_a, swap_b;
    swap_a.pi = make_corr({1, 0});
    swap_b.pi = make_corr({1, 0});
    store.insert(0, 2, swap_a);
    store.insert(2, 1, swap_b);
    CHECK(compose_maps({0, 2, 1}, store).target_index == std::vector<int>{0, 1});
}

TEST_CASE("composition equals the 0/1 matrix product oracle") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> size_dist(2, 5);
        const std::vector<int> sizes = {size_dist(rng), size_dist(rng), size_dist(rng),
                                        size_dist(rng)};
        std::vector<Correspondence> maps;
        PairStore store;
        for (int leg = 0; leg < 3; ++leg) {
            Correspondence corr;
            std::uniform_int_distribution<int> pick(0, sizes[static_cast<size_t>(leg) + 1] - 1);
            for (int i = 0; i < sizes[static_cast<size_t>(leg)]; ++i)
                corr.target_index.push_back(pick(rng));
            maps.push_back(corr);
            MatchResult r;
            r.pi = corr;
            store.insert(leg, leg + 1, r);
        }
        const Correspondence composed = compose_maps({0, 1, 2, 3}, store);
        const Correspondence oracle = testing::matrix_product_composition(maps, sizes);
        CHECK(composed.target_index == oracle.target_index);
    }
}

TEST_CASE("composition is associative") {
    std::mt19937 rng(29);
    std::uniform_int_distribution<int> pick(0, 4);
    Correspondence p, q, r;
    for (int i = 0; i < 5; ++i) {
        p.target_index.push_back(pick(rng));
        q.target_index.push_back(pick(rng));
        r.target_index.push_back(pick(rng));
    }
    auto compose2 = [](const Correspondence& x, const Correspondence& y) {
        Correspondence out = x;
        for (int& t : out.target_index) t = y(t);
        return out;
    };
    CHECK(compose2(compose2(p, q), r).target_index == compose2(p, compose2(q, r)).target_index);
}

TEST_CASE("missing pairs in the store are reported") {
    PairStore store;
    CHECK_THROWS_WITH_AS(compose_maps({0, 1}, store), doctest::Contains("missing"),
                         std::runtime_error);
}

TEST_CASE("cycle score vanishes for perfect agreement") {
    const Mesh target = testing::unit_square();
    CHECK(cycle_consistency_score(target.vertices, target, make_corr({0, 1, 2, 3})) == 0.0);
}

TEST_CASE("cycle score equals a direct energy evaluation") {
    std::mt19937 rng(31);
    std::normal_distribution<double> gauss;
    const Mesh target = testing::random_grid_mesh(3, 3, 5);
    Eigen::Matrix<double, Eigen::Dynamic, 3> registration = target.vertices;
    for (int i = 0; i < registration.size(); ++i) registration.data()[i] += 0.2 * gauss(rng);
    Correspondence pi;
    std::uniform_int_distribution<int> pick(0, 8);
    for (int i = 0; i < 9; ++i) pi.target_index.push_back(pick(rng));

    double expected = 0.0;
    for (int i = 0; i < 9; ++i)
        expected += (registration.row(i) - target.vertices.row(pi(i))).squaredNorm();
    CHECK(cycle_consistency_score(registration, target, pi) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("multi_match bundles path, composition and score") {
    // Chain graph 0-1-2-3 with cheap chain edges and dear direct ones.
    const int n = 4;
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n, n, 10.0);
    w.diagonal().setZero();
    for (int v = 0; v + 1 < n; ++v) w(v, v + 1) = w(v + 1, v) = 1.0;

    PairStore store;
    std::vector<Mesh> meshes;
    for (int v = 0; v < n; ++v) meshes.push_back(testing::random_grid_mesh(3, 3, 40 + v));
    std::mt19937 rng(37);
    std::uniform_int_distribution<int> pick(0, 8);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            MatchResult r;
            for (int v = 0; v < 9; ++v) r.pi.target_index.push_back(pick(rng));
            r.registration = meshes[static_cast<size_t>(i)].vertices;
            store.insert(i, j, r);
        }
    }
    const ShapeGraph graph = build_graph(w, node_ids(n), Topology::Full);

    CHECK_THROWS_AS(multi_match(graph, store, 2, 2, meshes), std::invalid_argument);

    // Adjacent query: direct edge is optimal, so the stored map is returned.
    const MultiMatch direct = multi_match(graph, store, 1, 2, meshes);
    CHECK(direct.path == std::vector<int>{1, 2});
    CHECK(direct.pi.target_index == store.get(1, 2).pi.target_index);

    // End-to-end query walks the chain; compare against hand composition.
    const MultiMatch chained = multi_match(graph, store, 0, 3, meshes);
    CHECK(chained.path == std::vector<int>{0, 1, 2, 3});
    Correspondence expected = store.get(0, 1).pi;
    for (int& t : expected.target_index) t = store.get(1, 2).pi(t);
    for (int& t : expected.target_index) t = store.get(2, 3).pi(t);
    CHECK(chained.pi.target_index == expected.target_index);
    CHECK(chained.cycle_score ==
          doctest::Approx(cycle_consistency_score(store.get(0, 3).registration, meshes[3],
                                                  chained.pi))
              .epsilon(1e-15));
}

TEST_CASE("ground-truth bijections along a path compose exactly") {
    // Stored maps are exact permutations; the multi-match must reproduce
    // their composition with no error.
    const int n = 4, m = 6;
    std::mt19937 rng(41);
    PairStore store;
    std::vector<std::vector<int>> perms;
    for (int leg = 0; leg < n - 1; ++leg) {
        std::vector<int> p(m);
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        perms.push_back(p);
        MatchResult r;
        r.pi.target_index = p;
        store.insert(leg, leg + 1, r);
    }
    const Correspondence composed = compose_maps({0, 1, 2, 3}, store);
    for (int v = 0; v < m; ++v) {
        const int expected = perms[2][static_cast<size_t>(perms[1][static_cast<size_t>(perms[0][static_cast<size_t>(v)])])];
        CHECK(composed(v) == expected);
    }
}

TEST_CASE("full-graph shortest paths never lose to sparse ones") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5;
        const Eigen::MatrixXd w = random_weights(n, rng);
        const ShapeGraph full = build_graph(w, node_ids(n), Topology::Full);
        for (Topology topo : {Topology::Mst, Topology::Tsp, Topology::Star}) {
            const ShapeGraph sparse = build_graph(w, node_ids(n), topo);
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    auto weight_of = [&](const std::vector<int>& path) {
                        double total = 0.0;
                        for (size_t s = 0; s + 1 < path.size(); ++s)
                            total += w(path[s], path[s + 1]);
                        return total;
                    };
                    CHECK(weight_of(shortest_path(full, i, j)) <=
                          weight_of(shortest_path(sparse, i, j)) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("two-node MDS splits the distance symmetrically") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
    w(0, 1) = w(1, 0) = 3.0;
    const ShapeGraph graph = build_graph(w, node_ids(2), Topology::Full);
    const MdsResult mds = mds_embedding(graph);
    CHECK(std::abs(mds.coordinates(0, 0) - 1.5) < 1e-9);
    CHECK(std::abs(mds.coordinates(1, 0) + 1.5) < 1e-9);
    CHECK(std::abs(mds.coordinates(0, 1)) < 1e-9);
}

TEST_CASE("equilateral distances embed as an equilateral triangle") {
    const Eigen::MatrixXd w = symmetric_weights({1, 1, 1}, 3);
    const MdsResult mds = mds_embedding(build_graph(w, node_ids(3), Topology::Full));
    const auto dist = [&](int a, int b) {
        return (mds.coordinates.row(a) - mds.coordinates.row(b)).norm();
    };
    CHECK(std::abs(dist(0, 1) - dist(1, 2)) < 1e-6);
    CHECK(std::abs(dist(0, 1) - dist(0, 2)) < 1e-6);
    CHECK(std::abs(dist(0, 1) - 1.0) < 1e-6);
}

TEST_CASE("MDS output is centered with a fixed orientation") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 4 + trial % 4;
        const ShapeGraph graph =
            build_graph(random_weights(n, rng), node_ids(n), Topology::Full);
        const MdsResult mds = mds_embedding(graph);
        CHECK(mds.coordinates.colwise().mean().cwiseAbs().maxCoeff() < 1e-9);
        for (int axis = 0; axis < 2; ++axis) {
            for (int v = 0; v < n; ++v) {
                if (mds.coordinates(v, axis) != 0.0) {
                    CHECK(mds.coordinates(v, axis) > 0.0);
                    break;
                }
            }
        }
    }
}

TEST_CASE("MDS distances over sparse graphs use path sums, not raw weights") {
    // Chain weights: the graph distance 0..2 is 2, although w(0,2) = 10.
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = w(1, 0) = 1.0;
    w(1, 2) = w(2, 1) = 1.0;
    w(0, 2) = w(2, 0) = 10.0;
    const ShapeGraph mst = build_graph(w, node_ids(3), Topology::Mst);
    const MdsResult mds = mds_embedding(mst);
    const double d02 = (mds.coordinates.row(0) - mds.coordinates.row(2)).norm();
    CHECK(std::abs(d02 - 2.0) < 1e-6);  // collinear chain embeds exactly
}

TEST_CASE("graph JSON round trip preserves everything") {
    testing::TempDir dir("graphjson");
    std::mt19937 rng(53);
    const Eigen::MatrixXd w = random_weights(5, rng);
    const ShapeGraph graph = build_graph(w, node_ids(5), Topology::Mst);
    const MdsResult mds = mds_embedding(graph);
    save_graph_json(graph, mds, dir.file("graph.json"));

    const ShapeGraph back = load_graph_json(dir.file("graph.json"));
    CHECK(back.nodes == graph.nodes);
    CHECK(back.topology == graph.topology);
    CHECK(back.retained_edges == graph.retained_edges);
    CHECK((back.weights - graph.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weight matrix validation") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = 1.0;  // asymmetric
    CHECK_THROWS_AS(build_graph(w, node_ids(3), Topology::Full), std::invalid_argument);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d(1, 1) = 2.0;  // nonzero diagonal
    CHECK_THROWS_AS(build_graph(d, node_ids(3), Topology::Full), std::invalid_argument);
}
