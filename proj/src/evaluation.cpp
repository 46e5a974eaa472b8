// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/evaluation.hpp"

#include "meshmatch/geodesic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace meshmatch {

GroundTruth identity_ground_truth(int m) {
    GroundTruth gt;
    gt.pairs.reserve(static_cast<size_t>(m));
    for (int v = 0; v < m; ++v) gt.pairs.emplace_back(v, v);
    return gt;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open ground-truth file");
    GroundTruth gt;
    std::string line;
    int line_no = 0;
    std::set<int> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
        std::istringstream ss(line);
        int s, t;
        if (!(ss >> s)) continue;  // blank line
        if (!(ss >> t))
            throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                                     ": expected two integers");
        if (!seen.insert(s).second)
            throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                                     ": duplicate source index " + std::to_string(s));
        gt.pairs.emplace_back(s, t);
    }
    return gt;
}

namespace {

void finalize(EvalReport& report) {
    const size_t count = report.per_vertex_error.size();
    report.mean_error = 0.0;
    for (double e : report.per_vertex_error) report.mean_error += e;
    if (count > 0) report.mean_error /= static_cast<double>(count);

    report.curve.clear();
    report.curve.reserve(kCurveSamples);
    for (int s = 0; s < kCurveSamples; ++s) {
        const double threshold = kCurveMaxThreshold * s / (kCurveSamples - 1);
        size_t below = 0;
        for (double e : report.per_vertex_error)
            if (e <= threshold) ++below;
        report.curve.emplace_back(threshold,
                                  count > 0 ? static_cast<double>(below) / count : 0.0);
    }
}

}  // namespace

EvalReport geodesic_error(const Correspondence& pred, const GroundTruth& gt, const Mesh& target) {
    const int n = target.num_vertices();
    const double norm = std::sqrt(total_area(target));

    EvalReport report;
    report.per_vertex_error.reserve(gt.pairs.size());

    // One Dijkstra per distinct predicted vertex; reused across reference
    // pairs that share it.
    const std::vector<GraphEdge> edges = mesh_edges(target);
    std::map<int, Eigen::VectorXd> distance_cache;

    for (const auto& [s, t_ref] : gt.pairs) {
        if (s < 0 || s >= pred.size())
            throw std::invalid_argument("geodesic_error: reference source index " +
                                        std::to_string(s) + " not covered by the prediction");
        if (t_ref < 0 || t_ref >= n)
            throw std::invalid_argument("geodesic_error: reference target index out of range");
        const int p = pred(s);
        auto it = distance_cache.find(p);
        if (it == distance_cache.end())
            it = distance_cache.emplace(p, shortest_path_distances(n, edges, {p}).distances).first;
        const double d = it->second[t_ref];
        if (!std::isfinite(d)) {
            ++report.unreachable;
            continue;
        }
        report.per_vertex_error.push_back(d / norm);
    }
    finalize(report);
    return report;
}

EvalReport aggregate(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("aggregate: empty report list");
    EvalReport out;
    for (const EvalReport& r : reports) {
        out.per_vertex_error.insert(out.per_vertex_error.end(), r.per_vertex_error.begin(),
                                    r.per_vertex_error.end());
        out.unreachable += r.unreachable;
    }
    finalize(out);
    return out;
}

void save_curve_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "threshold,fraction\n";
    out << std::setprecision(17);
    for (const auto& [threshold, fraction] : report.curve)
        out << threshold << "," << fraction << "\n";
}

void save_report_json(const EvalReport& report, const std::string& pair_name,
                      const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["pair"] = pair_name;
    doc["mean_error"] = report.mean_error;
    doc["count"] = report.per_vertex_error.size();
    doc["unreachable"] = report.unreachable;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << doc.dump(2) << "\n";
}

}  // namespace meshmatch
