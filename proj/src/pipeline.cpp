// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/pipeline.hpp"

#include "meshmatch/evaluation.hpp"
#include "meshmatch/hashing.hpp"
#include "meshmatch/mesh_io.hpp"
#include "meshmatch/spectral_cache.hpp"
#include "meshmatch/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace meshmatch {

namespace fs = std::filesystem;
using nlohmann::json;

int PipelineConfig::cached_basis_size() const {
    return std::max(match.k_max, descriptor.eigen_count) + cache_margin;
}

namespace {

json match_config_json(const MatchConfig& m) {
    return json{{"k_min", m.k_min},
                {"k_max", m.k_max},
                {"schedule_steps", m.schedule_steps},
                {"entropy_weight", m.entropy_weight},
                {"sinkhorn_iters", m.sinkhorn_iters},
                {"sinkhorn_tol", m.sinkhorn_tol},
                {"area_weighted_marginals", m.area_weighted_marginals},
                {"subsample", m.subsample}};
}

json descriptor_config_json(const DescriptorConfig& d) {
    return json{{"num_energies", d.num_energies}, {"sigma", d.sigma},
                {"eigen_count", d.eigen_count}};
}

// Hash scope for pair artifacts: everything that changes the matched
// output. Topology, query lists and job counts stay out so that e.g.
// switching graph topologies reuses the pairwise cache.
std::uint64_t pair_config_hash(const PipelineConfig& config) {
    json j;
    j["match"] = match_config_json(config.match);
    j["descriptor"] = descriptor_config_json(config.descriptor);
    j["cache_margin"] = config.cache_margin;
    return fnv1a64(j.dump());
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
        out << content;
        if (!out) throw std::runtime_error(tmp.string() + ": write failed");
    }
    fs::rename(tmp, path);
}

std::string correspondence_text(const Correspondence& corr) {
    std::string out;
    out.reserve(static_cast<size_t>(corr.size()) * 6);
    for (int t : corr.target_index) {
        out += std::to_string(t);
        out += '\n';
    }
    return out;
}

Correspondence read_correspondence(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open correspondence file");
    Correspondence corr;
    int idx;
    while (in >> idx) corr.target_index.push_back(idx);
    return corr;
}

struct CollectionEntry {
    fs::path path;
    std::string id;
    std::uint64_t hash = 0;
    Mesh mesh;  // preprocessed
};

std::string pair_name(const CollectionEntry& a, const CollectionEntry& b) {
    return a.id + "__" + b.id;
}

[[noreturn]] void stage_failure(const std::string& stage, const std::string& subject,
                                const std::exception& err) {
    throw std::runtime_error(stage + " stage failed for " + subject + ": " + err.what());
}

}  // namespace

std::string PipelineConfig::canonical_string() const {
    json j;
    j["match"] = match_config_json(match);
    j["descriptor"] = descriptor_config_json(descriptor);
    j["topology"] = topology_name(topology);
    j["lambda_cyc"] = lambda_cyc;
    j["cache_margin"] = cache_margin;
    j["refine_passes"] = refine_passes;
    return j.dump();
}

std::uint64_t PipelineConfig::hash() const { return fnv1a64(canonical_string()); }

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path.string() + ": cannot open config file");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& err) {
        throw ValidationError(path.string() + ": " + err.what());
    }

    PipelineConfig config;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "topology") config.topology = topology_from_name(value.get<std::string>());
            else if (key == "lambda_cyc") config.lambda_cyc = value.get<double>();
            else if (key == "cache_margin") config.cache_margin = value.get<int>();
            else if (key == "jobs") config.jobs = value.get<int>();
            else if (key == "refine_passes") config.refine_passes = value.get<int>();
            else if (key == "gt_dir") config.gt_dir = value.get<std::string>();
            else if (key == "pairs_file") config.pairs_file = value.get<std::string>();
            else if (key == "cache_root") config.cache_root = value.get<std::string>();
            else if (key == "match") {
                for (const auto& [mk, mv] : value.items()) {
                    if (mk == "k_min") config.match.k_min = mv.get<int>();
                    else if (mk == "k_max") config.match.k_max = mv.get<int>();
                    else if (mk == "schedule_steps") config.match.schedule_steps = mv.get<int>();
                    else if (mk == "entropy_weight") config.match.entropy_weight = mv.get<double>();
                    else if (mk == "sinkhorn_iters") config.match.sinkhorn_iters = mv.get<int>();
                    else if (mk == "sinkhorn_tol") config.match.sinkhorn_tol = mv.get<double>();
                    else if (mk == "area_weighted_marginals")
                        config.match.area_weighted_marginals = mv.get<bool>();
                    else if (mk == "subsample") config.match.subsample = mv.get<int>();
                    else throw ValidationError(path.string() + ": unknown match key '" + mk + "'");
                }
            } else if (key == "descriptor") {
                for (const auto& [dk, dv] : value.items()) {
                    if (dk == "num_energies") config.descriptor.num_energies = dv.get<int>();
                    else if (dk == "sigma") config.descriptor.sigma = dv.get<double>();
                    else if (dk == "eigen_count") config.descriptor.eigen_count = dv.get<int>();
                    else
                        throw ValidationError(path.string() + ": unknown descriptor key '" + dk +
                                              "'");
                }
            } else {
                throw ValidationError(path.string() + ": unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& err) {
        throw ValidationError(path.string() + ": " + err.what());
    }
    return config;
}

PipelineResult run_pipeline(const fs::path& collection_dir, const fs::path& out_dir,
                            const PipelineConfig& config, Stage up_to) {
    // ---- discover the collection ----
    if (!fs::is_directory(collection_dir))
        throw ValidationError(collection_dir.string() + ": not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(collection_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".off" || ext == ".ply") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.size() < 2)
        throw ValidationError(collection_dir.string() +
                              ": need at least 2 OFF/PLY meshes, found " +
                              std::to_string(files.size()));

    fs::create_directories(out_dir);
    fs::path cache_root = config.cache_root;
    if (cache_root.empty()) {
        if (const char* env = std::getenv("MESHMATCH_CACHE")) cache_root = env;
        else cache_root = out_dir / "cache";
    }
    fs::create_directories(cache_root / "spectral");
    fs::create_directories(cache_root / "pairs");

    json manifest;
    manifest["tool_version"] = kVersion;
    manifest["created"] = static_cast<std::int64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    manifest["config"] = json::parse(config.canonical_string());
    manifest["config_hash"] = hash_hex(config.hash());
    const std::uint64_t pair_cfg_hash = pair_config_hash(config);
    manifest["pair_config_hash"] = hash_hex(pair_cfg_hash);

    auto finish = [&](PipelineResult result) {
        write_text_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
        return result;
    };

    // ---- preprocess ----
    std::vector<CollectionEntry> shapes;
    shapes.reserve(files.size());
    for (const fs::path& file : files) {
        CollectionEntry entry;
        entry.path = file;
        entry.id = file.stem().string();
        for (const CollectionEntry& other : shapes)
            if (other.id == entry.id)
                throw ValidationError("duplicate mesh id '" + entry.id +
                                      "' in collection (filename stems must be unique)");
        try {
            entry.hash = hash_file(file);
            entry.mesh = preprocess(load_mesh(file));
        } catch (const std::exception& err) {
            throw ValidationError("preprocess stage failed for mesh '" + entry.id +
                                  "': " + err.what());
        }
        shapes.push_back(std::move(entry));
    }
    const int n = static_cast<int>(shapes.size());

    PipelineResult result;
    for (const CollectionEntry& s : shapes) {
        result.ids.push_back(s.id);
        result.mesh_hashes.push_back(s.hash);
        manifest["meshes"][s.id] = {{"hash", hash_hex(s.hash)},
                                    {"vertices", s.mesh.num_vertices()},
                                    {"triangles", s.mesh.num_triangles()}};
    }

    const fs::path preprocessed_dir = out_dir / "preprocessed";
    fs::create_directories(preprocessed_dir);
    for (const CollectionEntry& s : shapes)
        save_ply(s.mesh, preprocessed_dir / (s.id + ".ply"));
    manifest["stages"]["preprocess"] = "done";
    if (up_to == Stage::Preprocess) return finish(result);

    // Desk-scale guardrail for the quadratic transport stage.
    for (const CollectionEntry& s : shapes) {
        if (s.mesh.num_vertices() > 10000 && config.match.subsample <= 0)
            throw ValidationError("mesh '" + s.id + "' has " +
                                  std::to_string(s.mesh.num_vertices()) +
                                  " vertices; pairwise matching above 10k requires --subsample");
    }

    // ---- spectral ----
    std::vector<SpectralBasis> bases(static_cast<size_t>(n));
    std::vector<FeatureEmbedding> descriptors(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const CollectionEntry& s = shapes[static_cast<size_t>(i)];
        const int m = s.mesh.num_vertices();
        if (config.match.k_max > m)
            throw ValidationError("mesh '" + s.id + "' has only " + std::to_string(m) +
                                  " vertices; k_max = " + std::to_string(config.match.k_max) +
                                  " does not fit");
        const int k_cache = std::min(config.cached_basis_size(), m);
        const fs::path cache_file =
            cache_root / "spectral" / (hash_hex(s.hash) + "-k" + std::to_string(k_cache) + ".bin");
        try {
            std::optional<SpectralBasis> cached = load_spectral_cache(cache_file, s.hash);
            if (cached && cached->size() == k_cache) {
                bases[static_cast<size_t>(i)] = std::move(*cached);
                manifest["spectral"][s.id] = "cached";
            } else {
                bases[static_cast<size_t>(i)] =
                    eigendecomposition(mass_matrix(s.mesh), stiffness_matrix(s.mesh), k_cache);
                save_spectral_cache(cache_file, bases[static_cast<size_t>(i)], s.hash);
                manifest["spectral"][s.id] = "computed";
            }

            const int wks_k = std::min(config.descriptor.eigen_count, k_cache);
            SpectralBasis wks_basis;
            wks_basis.eigenfunctions = bases[static_cast<size_t>(i)].eigenfunctions.leftCols(wks_k);
            wks_basis.eigenvalues = bases[static_cast<size_t>(i)].eigenvalues.head(wks_k);
            wks_basis.mass_diagonal = bases[static_cast<size_t>(i)].mass_diagonal;
            descriptors[static_cast<size_t>(i)] =
                wks_descriptor(wks_basis, config.descriptor.num_energies, config.descriptor.sigma);
        } catch (const std::exception& err) {
            stage_failure("spectral", "mesh '" + s.id + "'", err);
        }
    }
    manifest["stages"]["spectral"] = "done";
    if (up_to == Stage::Spectral) return finish(result);

    // ---- pairwise matching (both orientations of every unordered pair) ----
    std::vector<std::pair<int, int>> ordered_pairs;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) ordered_pairs.emplace_back(i, j);

    struct PairOutcome {
        MatchResult match;
        bool cached = false;
    };
    std::vector<std::optional<PairOutcome>> outcomes(ordered_pairs.size());

    auto pair_cache_dir = [&](int i, int j) {
        return cache_root / "pairs" /
               (hash_hex(shapes[static_cast<size_t>(i)].hash) + "-" +
                hash_hex(shapes[static_cast<size_t>(j)].hash) + "-" + hash_hex(pair_cfg_hash));
    };

    auto process_pair = [&](size_t index) {
        const auto [i, j] = ordered_pairs[index];
        const CollectionEntry& a = shapes[static_cast<size_t>(i)];
        const CollectionEntry& b = shapes[static_cast<size_t>(j)];
        const fs::path dir = pair_cache_dir(i, j);
        const fs::path corr_file = dir / "corr.txt";
        const fs::path reg_file = dir / "reg.ply";
        const fs::path meta_file = dir / "meta.json";

        PairOutcome outcome;
        if (fs::exists(corr_file) && fs::exists(reg_file) && fs::exists(meta_file)) {
            outcome.cached = true;
            outcome.match.pi = read_correspondence(corr_file);
            outcome.match.registration = load_mesh_unchecked(reg_file).vertices;
            std::ifstream meta_in(meta_file);
            json meta;
            meta_in >> meta;
            outcome.match.match_loss = meta.at("match_loss").get<double>();
            outcome.match.per_level_energy =
                meta.at("per_level_energy").get<std::vector<double>>();
        } else {
            outcome.match = hierarchical_match(a.mesh, bases[static_cast<size_t>(i)],
                                               descriptors[static_cast<size_t>(i)], b.mesh,
                                               bases[static_cast<size_t>(j)],
                                               descriptors[static_cast<size_t>(j)], config.match);
            fs::create_directories(dir);
            write_text_atomic(corr_file, correspondence_text(outcome.match.pi));
            Mesh reg_mesh;
            reg_mesh.vertices = outcome.match.registration;
            reg_mesh.triangles = a.mesh.triangles;
            reg_mesh.id = pair_name(a, b);
            save_ply(reg_mesh, reg_file);
            json meta;
            meta["source"] = a.id;
            meta["target"] = b.id;
            meta["match_loss"] = outcome.match.match_loss;
            meta["per_level_energy"] = outcome.match.per_level_energy;
            meta["config_hash"] = hash_hex(pair_cfg_hash);
            write_text_atomic(meta_file, meta.dump(2) + "\n");
        }
        outcomes[index] = std::move(outcome);
    };

    {
        unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                        : std::max(1u, std::thread::hardware_concurrency());
        jobs = std::min<unsigned>(jobs, static_cast<unsigned>(ordered_pairs.size()));
        std::atomic<size_t> next{0};
        std::mutex error_mutex;
        std::optional<std::string> first_error;
        auto worker = [&]() {
            for (;;) {
                const size_t index = next.fetch_add(1);
                if (index >= ordered_pairs.size()) return;
                try {
                    process_pair(index);
                } catch (const std::exception& err) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        const auto [i, j] = ordered_pairs[index];
                        first_error = "pairwise stage failed for pair " +
                                      pair_name(shapes[static_cast<size_t>(i)],
                                                shapes[static_cast<size_t>(j)]) +
                                      ": " + err.what();
                    }
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (first_error) throw std::runtime_error(*first_error);
    }

    PairStore store;
    const fs::path pairs_dir = out_dir / "pairs";
    fs::create_directories(pairs_dir);
    for (size_t index = 0; index < ordered_pairs.size(); ++index) {
        const auto [i, j] = ordered_pairs[index];
        PairOutcome& outcome = *outcomes[index];
        const std::string name =
            pair_name(shapes[static_cast<size_t>(i)], shapes[static_cast<size_t>(j)]);
        manifest["pairs"][name] = {{"cached", outcome.cached}};
        if (outcome.cached) ++result.pair_cache_hits;
        else ++result.pair_computed;

        const fs::path dir = pair_cache_dir(i, j);
        fs::copy_file(dir / "corr.txt", pairs_dir / (name + ".corr"),
                      fs::copy_options::overwrite_existing);
        fs::copy_file(dir / "reg.ply", pairs_dir / (name + ".reg.ply"),
                      fs::copy_options::overwrite_existing);
        fs::copy_file(dir / "meta.json", pairs_dir / (name + ".meta.json"),
                      fs::copy_options::overwrite_existing);
        store.insert(i, j, std::move(outcome.match));
    }
    manifest["stages"]["pairs"] = "done";
    if (up_to == Stage::Pairs) return finish(result);

    // ---- shape graph (the refine pass rebuilds from the same converged
    // matches, so extra passes re-emit identical artifacts) ----
    std::vector<std::string> ids;
    std::vector<Mesh> meshes;
    for (const CollectionEntry& s : shapes) {
        ids.push_back(s.id);
        meshes.push_back(s.mesh);
    }
    ShapeGraph graph;
    MdsResult mds;
    const int passes = std::max(1, config.refine_passes);
    for (int pass = 0; pass < passes; ++pass) {
        try {
            graph = build_graph(store, ids, config.topology, meshes);
            mds = mds_embedding(graph);
        } catch (const std::exception& err) {
            stage_failure("graph", "collection", err);
        }
    }
    save_graph_json(graph, mds, out_dir / "graph.json");
    manifest["stages"]["graph"] = "done";
    if (up_to == Stage::Graph) return finish(result);

    // ---- multi-match ----
    std::vector<std::pair<int, int>> queries;
    if (!config.pairs_file.empty()) {
        std::ifstream in(config.pairs_file);
        if (!in) throw ValidationError(config.pairs_file.string() + ": cannot open pairs file");
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
            std::istringstream ss(line);
            std::string ida, idb;
            if (!(ss >> ida)) continue;
            if (!(ss >> idb))
                throw ValidationError(config.pairs_file.string() + ": line " +
                                      std::to_string(line_no) + ": expected two mesh ids");
            auto locate = [&](const std::string& id) {
                for (int v = 0; v < n; ++v)
                    if (ids[static_cast<size_t>(v)] == id) return v;
                throw ValidationError(config.pairs_file.string() + ": line " +
                                      std::to_string(line_no) + ": unknown mesh id '" + id + "'");
            };
            const int qi = locate(ida), qj = locate(idb);
            if (qi == qj)
                throw ValidationError(config.pairs_file.string() + ": line " +
                                      std::to_string(line_no) + ": pair must name two shapes");
            queries.emplace_back(qi, qj);
        }
        if (queries.empty())
            throw ValidationError(config.pairs_file.string() + ": no query pairs found");
    } else {
        queries = ordered_pairs;
    }

    const fs::path multi_dir = out_dir / "multi";
    fs::create_directories(multi_dir);
    std::vector<MultiMatch> multi(queries.size());
    double cycle_sum = 0.0;
    for (size_t q = 0; q < queries.size(); ++q) {
        const auto [i, j] = queries[q];
        const std::string name =
            pair_name(shapes[static_cast<size_t>(i)], shapes[static_cast<size_t>(j)]);
        try {
            multi[q] = multi_match(graph, store, i, j, meshes);
        } catch (const std::exception& err) {
            stage_failure("multi-match", "pair " + name, err);
        }
        write_text_atomic(multi_dir / (name + ".corr"), correspondence_text(multi[q].pi));
        json record;
        record["pair"] = name;
        json path_ids = json::array();
        for (int node : multi[q].path) path_ids.push_back(ids[static_cast<size_t>(node)]);
        record["path"] = path_ids;
        record["cycle_score"] = multi[q].cycle_score;
        record["direct_cycle_score"] = cycle_consistency_score(
            store.get(i, j).registration, meshes[static_cast<size_t>(j)], store.get(i, j).pi);
        write_text_atomic(multi_dir / (name + ".json"), record.dump(2) + "\n");
        cycle_sum += multi[q].cycle_score;
    }
    {
        json summary;
        summary["pairs"] = queries.size();
        summary["mean_cycle_score"] = queries.empty() ? 0.0 : cycle_sum / queries.size();
        summary["lambda_cyc"] = config.lambda_cyc;
        write_text_atomic(multi_dir / "summary.json", summary.dump(2) + "\n");
    }
    manifest["stages"]["multi_match"] = "done";
    if (up_to == Stage::MultiMatch) return finish(result);

    // ---- evaluation (only for pairs with ground truth present) ----
    if (!config.gt_dir.empty()) {
        const fs::path eval_dir = out_dir / "eval";
        fs::create_directories(eval_dir);
        std::vector<EvalReport> multi_reports, direct_reports;
        json evaluated = json::array();
        for (size_t q = 0; q < queries.size(); ++q) {
            const auto [i, j] = queries[q];
            const std::string name =
                pair_name(shapes[static_cast<size_t>(i)], shapes[static_cast<size_t>(j)]);
            const fs::path gt_file = config.gt_dir / (name + ".txt");
            if (!fs::exists(gt_file)) continue;
            try {
                const GroundTruth gt = load_ground_truth(gt_file);
                const Mesh& target = meshes[static_cast<size_t>(j)];
                const EvalReport multi_report = geodesic_error(multi[q].pi, gt, target);
                const EvalReport direct_report = geodesic_error(store.get(i, j).pi, gt, target);
                save_curve_csv(multi_report, eval_dir / (name + "_multi.csv"));
                save_report_json(multi_report, name, eval_dir / (name + "_multi.json"));
                save_curve_csv(direct_report, eval_dir / (name + "_direct.csv"));
                save_report_json(direct_report, name, eval_dir / (name + "_direct.json"));
                result.multi_mean_error[name] = multi_report.mean_error;
                result.direct_mean_error[name] = direct_report.mean_error;
                multi_reports.push_back(multi_report);
                direct_reports.push_back(direct_report);
                evaluated.push_back(name);
            } catch (const std::exception& err) {
                stage_failure("evaluate", "pair " + name, err);
            }
        }
        if (!multi_reports.empty()) {
            json summary;
            summary["pairs"] = evaluated;
            summary["multi_mean_error"] = aggregate(multi_reports).mean_error;
            summary["direct_mean_error"] = aggregate(direct_reports).mean_error;
            write_text_atomic(eval_dir / "summary.json", summary.dump(2) + "\n");
        }
        manifest["stages"]["evaluate"] = "done";
    }
    if (up_to == Stage::Evaluate) return finish(result);

    // ---- colormap exports: source colored by normalized position, colors
    // pushed through the multi-match onto the target ----
    const fs::path colors_dir = out_dir / "colors";
    fs::create_directories(colors_dir);
    for (size_t q = 0; q < queries.size(); ++q) {
        const auto [i, j] = queries[q];
        const Mesh& src = meshes[static_cast<size_t>(i)];
        const Mesh& tgt = meshes[static_cast<size_t>(j)];
        const std::string name =
            pair_name(shapes[static_cast<size_t>(i)], shapes[static_cast<size_t>(j)]);

        const Eigen::RowVector3d lo = src.vertices.colwise().minCoeff();
        const Eigen::RowVector3d hi = src.vertices.colwise().maxCoeff();
        VertexColors src_colors(src.num_vertices(), 3);
        for (int v = 0; v < src.num_vertices(); ++v) {
            for (int c = 0; c < 3; ++c) {
                const double range = hi[c] - lo[c];
                const double x = range > 0.0 ? (src.vertices(v, c) - lo[c]) / range : 0.5;
                src_colors(v, c) = static_cast<std::uint8_t>(std::lround(255.0 * x));
            }
        }
        save_ply(src, colors_dir / (name + "_source.ply"), src_colors);

        Eigen::MatrixXd accum = Eigen::MatrixXd::Zero(tgt.num_vertices(), 3);
        Eigen::VectorXd hits = Eigen::VectorXd::Zero(tgt.num_vertices());
        for (int v = 0; v < src.num_vertices(); ++v) {
            const int t = multi[q].pi(v);
            accum.row(t) += src_colors.row(v).cast<double>();
            hits[t] += 1.0;
        }
        VertexColors tgt_colors(tgt.num_vertices(), 3);
        for (int v = 0; v < tgt.num_vertices(); ++v) {
            for (int c = 0; c < 3; ++c)
                tgt_colors(v, c) = hits[v] > 0.0
                                       ? static_cast<std::uint8_t>(std::lround(accum(v, c) / hits[v]))
                                       : static_cast<std::uint8_t>(128);
        }
        save_ply(tgt, colors_dir / (name + "_target.ply"), tgt_colors);
    }
    manifest["stages"]["colors"] = "done";
    return finish(result);
}

}  // namespace meshmatch
