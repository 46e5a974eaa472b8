// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/cli.hpp"

#include "meshmatch/evaluation.hpp"
#include "meshmatch/hashing.hpp"
#include "meshmatch/mesh_io.hpp"
#include "meshmatch/pipeline.hpp"
#include "meshmatch/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace meshmatch {

namespace fs = std::filesystem;

namespace {

struct CliOptions {
    std::string collection;
    std::string out;
    std::string config_file;
    std::string topology;
    int k_min = -1;
    int k_max = -1;
    double entropy = -1.0;
    int subsample = -1;
    std::string gt_dir;
    std::string pairs_file;
    int jobs = -1;

    PipelineConfig resolve() const {
        PipelineConfig config;
        if (!config_file.empty()) config = load_pipeline_config(config_file);
        if (!topology.empty()) config.topology = topology_from_name(topology);
        if (k_min >= 0) config.match.k_min = k_min;
        if (k_max >= 0) config.match.k_max = k_max;
        if (entropy >= 0.0) config.match.entropy_weight = entropy;
        if (subsample >= 0) config.match.subsample = subsample;
        if (!gt_dir.empty()) config.gt_dir = gt_dir;
        if (!pairs_file.empty()) config.pairs_file = pairs_file;
        if (jobs >= 0) config.jobs = jobs;
        return config;
    }
};

void add_stage_options(CLI::App* sub, CliOptions& opts, bool with_collection = true) {
    if (with_collection) {
        sub->add_option("collection", opts.collection, "directory of OFF/PLY meshes")->required();
        sub->add_option("out", opts.out, "output directory")->required();
    }
    sub->add_option("--config", opts.config_file, "JSON config file");
    sub->add_option("--topology", opts.topology, "graph topology: full|mst|tsp|star");
    sub->add_option("--kmin", opts.k_min, "smallest hierarchy level");
    sub->add_option("--kmax", opts.k_max, "largest hierarchy level");
    sub->add_option("--entropy", opts.entropy, "Sinkhorn entropy weight");
    sub->add_option("--subsample", opts.subsample, "farthest-point sample count (0 = off)");
    sub->add_option("--gt-dir", opts.gt_dir, "ground-truth directory (<a>__<b>.txt files)");
    sub->add_option("--pairs", opts.pairs_file, "explicit query pairs file ('idA idB' lines)");
    sub->add_option("--jobs", opts.jobs, "pairwise worker threads (0 = hardware)");
}

int run_stage(const CliOptions& opts, Stage stage) {
    const PipelineConfig config = opts.resolve();
    run_pipeline(opts.collection, opts.out, config, stage);
    return 0;
}

int run_match_pair(const std::string& file_a, const std::string& file_b, const CliOptions& opts) {
    const PipelineConfig config = opts.resolve();

    auto prepare = [&](const std::string& file, SpectralBasis& basis, FeatureEmbedding& wks) {
        Mesh mesh = preprocess(load_mesh(file));
        if (mesh.num_vertices() > 10000 && config.match.subsample <= 0)
            throw ValidationError("mesh '" + mesh.id +
                                  "' exceeds 10k vertices; pass --subsample");
        const int k_cache = std::min(config.cached_basis_size(), mesh.num_vertices());
        if (config.match.k_max > mesh.num_vertices())
            throw ValidationError("mesh '" + mesh.id + "' is too coarse for k_max");
        basis = eigendecomposition(mass_matrix(mesh), stiffness_matrix(mesh), k_cache);
        SpectralBasis head;
        const int wks_k = std::min(config.descriptor.eigen_count, k_cache);
        head.eigenfunctions = basis.eigenfunctions.leftCols(wks_k);
        head.eigenvalues = basis.eigenvalues.head(wks_k);
        head.mass_diagonal = basis.mass_diagonal;
        wks = wks_descriptor(head, config.descriptor.num_energies, config.descriptor.sigma);
        return mesh;
    };

    SpectralBasis basis_a, basis_b;
    FeatureEmbedding wks_a, wks_b;
    const Mesh mesh_a = prepare(file_a, basis_a, wks_a);
    const Mesh mesh_b = prepare(file_b, basis_b, wks_b);
    const MatchResult match = hierarchical_match(mesh_a, basis_a, wks_a, mesh_b, basis_b, wks_b,
                                                 config.match);

    fs::create_directories(opts.out);
    const std::string name = mesh_a.id + "__" + mesh_b.id;
    {
        std::ofstream corr(fs::path(opts.out) / (name + ".corr"), std::ios::trunc);
        for (int t : match.pi.target_index) corr << t << "\n";
    }
    Mesh reg = mesh_a;
    reg.vertices = match.registration;
    save_ply(reg, fs::path(opts.out) / (name + ".reg.ply"));
    nlohmann::json meta;
    meta["source"] = mesh_a.id;
    meta["target"] = mesh_b.id;
    meta["match_loss"] = match.match_loss;
    meta["per_level_energy"] = match.per_level_energy;
    meta["config_hash"] = hash_hex(config.hash());
    std::ofstream meta_out(fs::path(opts.out) / (name + ".meta.json"), std::ios::trunc);
    meta_out << meta.dump(2) << "\n";

    std::cout << name << ": match_loss = " << match.match_loss << "\n";
    return 0;
}

int run_mds(const CliOptions& opts) {
    run_pipeline(opts.collection, opts.out, opts.resolve(), Stage::Graph);
    std::ifstream in(fs::path(opts.out) / "graph.json");
    nlohmann::json graph;
    in >> graph;
    std::ofstream out(fs::path(opts.out) / "mds.csv", std::ios::trunc);
    out << "id,x,y\n";
    out.precision(17);
    for (size_t v = 0; v < graph.at("nodes").size(); ++v) {
        out << graph.at("nodes").at(v).get<std::string>() << ","
            << graph.at("mds").at(v).at(0).get<double>() << ","
            << graph.at("mds").at(v).at(1).get<double>() << "\n";
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"meshmatch: multi-shape correspondence via pairwise transport matching and an "
                 "affinity shape graph"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CliOptions opts;
    std::string pair_file_a, pair_file_b;

    CLI::App* cmd_run = app.add_subcommand("run", "full pipeline");
    add_stage_options(cmd_run, opts);
    CLI::App* cmd_pre = app.add_subcommand("preprocess", "normalize the collection");
    add_stage_options(cmd_pre, opts);
    CLI::App* cmd_spec = app.add_subcommand("spectral", "build spectral caches");
    add_stage_options(cmd_spec, opts);
    CLI::App* cmd_graph = app.add_subcommand("build-graph", "build the affinity graph");
    add_stage_options(cmd_graph, opts);
    CLI::App* cmd_multi = app.add_subcommand("multi-match", "propagate maps along the graph");
    add_stage_options(cmd_multi, opts);
    CLI::App* cmd_eval = app.add_subcommand("evaluate", "score against ground truth");
    add_stage_options(cmd_eval, opts);
    CLI::App* cmd_mds = app.add_subcommand("mds", "2D node embedding of the graph");
    add_stage_options(cmd_mds, opts);
    CLI::App* cmd_colors = app.add_subcommand("export-colors", "colormap transfer PLYs");
    add_stage_options(cmd_colors, opts);

    CLI::App* cmd_pair = app.add_subcommand("match-pair", "match one ordered mesh pair");
    cmd_pair->add_option("source", pair_file_a, "source mesh file")->required();
    cmd_pair->add_option("target", pair_file_b, "target mesh file")->required();
    add_stage_options(cmd_pair, opts, false);
    cmd_pair->add_option("--out", opts.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;  // help/version exit cleanly
    }

    try {
        if (cmd_run->parsed()) return run_stage(opts, Stage::Colors);
        if (cmd_pre->parsed()) return run_stage(opts, Stage::Preprocess);
        if (cmd_spec->parsed()) return run_stage(opts, Stage::Spectral);
        if (cmd_graph->parsed()) return run_stage(opts, Stage::Graph);
        if (cmd_multi->parsed()) return run_stage(opts, Stage::MultiMatch);
        if (cmd_eval->parsed()) {
            if (opts.gt_dir.empty() && opts.config_file.empty())
                throw ValidationError("evaluate requires --gt-dir (or a config with gt_dir)");
            return run_stage(opts, Stage::Evaluate);
        }
        if (cmd_mds->parsed()) return run_mds(opts);
        if (cmd_colors->parsed()) return run_stage(opts, Stage::Colors);
        if (cmd_pair->parsed()) return run_match_pair(pair_file_a, pair_file_b, opts);
        return 2;
    } catch (const ValidationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return 1;
    }
}

}  // namespace meshmatch
