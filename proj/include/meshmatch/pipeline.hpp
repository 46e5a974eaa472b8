// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end pipeline with content-addressed caching:
// preprocess -> spectral -> all-pairs matching -> shape graph ->
// multi-match -> evaluation -> colormap exports.
//
// Every stage artifact is keyed on the hashes of its inputs plus the config
// hash, so editing one mesh invalidates exactly the pairs and graph
// artifacts that depend on it. Writes go to temp files renamed atomically.

#pragma once

#include "meshmatch/matching.hpp"
#include "meshmatch/shape_graph.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace meshmatch {

// Input rejected (bad arguments, unparseable collection, guardrails). The
// CLI maps this to exit code 2; everything else is an internal error (1).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DescriptorConfig {
    int num_energies = 128;  // descriptor width l
    double sigma = 0.0;      // 0 selects 7x the log-energy step
    int eigen_count = 50;    // eigenpairs feeding the descriptor (capped at m)
};

struct PipelineConfig {
    MatchConfig match;
    DescriptorConfig descriptor;
    Topology topology = Topology::Full;
    double lambda_cyc = 0.5;  // kept for config fidelity; no training happens here
    int cache_margin = 10;    // extra eigenpairs cached beyond what is needed
    int jobs = 0;             // pairwise worker threads, 0 = hardware concurrency
    int refine_passes = 1;    // graph rebuild + multi-match re-emission passes
    std::filesystem::path gt_dir;      // optional ground-truth directory
    std::filesystem::path pairs_file;  // optional explicit query pairs
    std::filesystem::path cache_root;  // empty: $MESHMATCH_CACHE or <out>/cache

    // Eigenpairs cached per mesh: max(k_max, descriptor needs) + margin.
    int cached_basis_size() const;

    // Canonical serialization used for the config hash; key order is fixed.
    std::string canonical_string() const;
    std::uint64_t hash() const;
};

// Parses a JSON config file (all keys optional, unknown keys rejected).
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// How far run_pipeline should go; stages are ordered.
enum class Stage {
    Preprocess,
    Spectral,
    Pairs,
    Graph,
    MultiMatch,
    Evaluate,
    Colors,
};

struct PipelineResult {
    std::vector<std::string> ids;
    std::vector<std::uint64_t> mesh_hashes;
    int pair_cache_hits = 0;
    int pair_computed = 0;
    std::map<std::string, double> multi_mean_error;   // per evaluated pair
    std::map<std::string, double> direct_mean_error;  // per evaluated pair
};

// Runs the pipeline up to `up_to` (inclusive). The collection directory
// must contain at least two parseable OFF/PLY meshes; ids are filename
// stems and must be unique. Artifacts land under out_dir, reusable results
// under the cache root.
PipelineResult run_pipeline(const std::filesystem::path& collection_dir,
                            const std::filesystem::path& out_dir, const PipelineConfig& config,
                            Stage up_to = Stage::Colors);

}  // namespace meshmatch
