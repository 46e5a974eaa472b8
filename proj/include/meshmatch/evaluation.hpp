// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Correspondence evaluation: geodesic error between predicted and reference
// matches on the target mesh, normalized by sqrt(target area), with
// cumulative error curves.

#pragma once

#include "meshmatch/geometry.hpp"
#include "meshmatch/matching.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace meshmatch {

// Reference matches: (source vertex, target vertex) pairs. May be sparse
// landmarks or a dense map; source indices must be unique.
struct GroundTruth {
    std::vector<std::pair<int, int>> pairs;
};

// Identity reference over m vertices (synthetic families share indexing).
GroundTruth identity_ground_truth(int m);

// Two-column 0-based integer text file, '#' comments allowed.
GroundTruth load_ground_truth(const std::filesystem::path& path);

struct EvalReport {
    std::vector<double> per_vertex_error;  // normalized geodesic distances
    double mean_error = 0.0;
    std::vector<std::pair<double, double>> curve;  // (threshold, fraction <= threshold)
    int unreachable = 0;  // reference pairs dropped because the target is disconnected
};

// Number of curve samples and threshold range of the cumulative curve.
constexpr int kCurveSamples = 200;
constexpr double kCurveMaxThreshold = 0.25;

// Per reference pair (s, t*): geodesic distance on the target between
// pred(s) and t*, divided by sqrt(target area). Unreachable pairs are
// excluded and counted.
EvalReport geodesic_error(const Correspondence& pred, const GroundTruth& gt, const Mesh& target);

// Concatenates the per-vertex errors and recomputes mean and curve.
EvalReport aggregate(const std::vector<EvalReport>& reports);

// (threshold, fraction) CSV with a header line.
void save_curve_csv(const EvalReport& report, const std::filesystem::path& path);

// {"pair": ..., "mean_error": ..., "count": ...} summary record.
void save_report_json(const EvalReport& report, const std::string& pair_name,
                      const std::filesystem::path& path);

}  // namespace meshmatch
