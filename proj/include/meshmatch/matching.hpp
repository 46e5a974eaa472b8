// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Pairwise matching layer: transport-plan energy, alternating functional
// map / displacement least squares over a hierarchy of spectral levels, and
// the final hard assignment.

#pragma once

#include "meshmatch/sinkhorn.hpp"
#include "meshmatch/spectral.hpp"

#include <Eigen/Core>

#include <vector>

namespace meshmatch {

// Total map: every source vertex is assigned a target vertex. Equivalent to
// a row-stochastic 0/1 assignment matrix.
struct Correspondence {
    std::vector<int> target_index;

    int size() const { return static_cast<int>(target_index.size()); }
    int operator()(int i) const { return target_index[static_cast<size_t>(i)]; }
};

struct AlignmentParams {
    Eigen::MatrixXd map_c;  // k x k functional map
    Eigen::MatrixXd tau;    // k x 3 displacement coefficients

    int level() const { return static_cast<int>(map_c.rows()); }
};

struct MatchConfig {
    int k_min = 6;
    int k_max = 21;
    int schedule_steps = 10;        // log-spaced samples between k_min and k_max
    double entropy_weight = 5e-3;
    int sinkhorn_iters = 100;
    double sinkhorn_tol = 1e-7;
    bool area_weighted_marginals = false;  // default: uniform 1/m and 1/n
    int subsample = 0;   // farthest-point count for the transport problem; 0 = off
    bool record_trace = false;  // per-step energies for descent diagnostics

    void validate(int cached_basis_size) const;
};

// Per-level energy bookkeeping, filled when MatchConfig::record_trace is on.
// Energies are E_match,reg over the embeddings as the solver sees them: the
// normals block is frozen at its start-of-level value, so both the Sinkhorn
// step and the least-squares step are exact block descents.
struct LevelTrace {
    int level = 0;
    double energy_initial = 0.0;        // previous plan, start-of-level embedding
    double energy_after_sinkhorn = 0.0;
    double energy_after_fit = 0.0;
};

struct MatchResult {
    Correspondence pi;
    Eigen::Matrix<double, Eigen::Dynamic, 3> registration;  // deformed source vertices
    double match_loss = 0.0;                 // sum of per_level_energy
    std::vector<double> per_level_energy;    // unregularized energy per level
    AlignmentParams final_alignment;
    std::vector<LevelTrace> trace;
};

// sum_ij plan_ij ||F_i - G_j||^2. Plain accumulation so a 0/1 plan gives
// bit-identical results to the Correspondence overload.
double match_energy(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, const TransportPlan& plan);
double match_energy(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                    const Correspondence& corr);

// sum plan_ij log plan_ij with 0 log 0 = 0.
double plan_entropy(const TransportPlan& plan);

// cost_ij = ||a_i - b_j||^2, computed blockwise (clamped at zero).
Eigen::MatrixXd pairwise_squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Minimizer of the matching energy at a fixed plan, restricted to the
// spectral and coordinate blocks (the normals block depends nonlinearly on
// the parameters and is left out of the fit). Target quantities are pulled
// to the source side by the row-normalized plan; the weighted normal
// equations carry Tikhonov damping 1e-9.
AlignmentParams fit_alignment(const TransportPlan& plan, const ShellEmbedding& source,
                              const ShellEmbedding& target);

// target_index[i] = argmin_j ||source_i - target_j||^2, ties to the
// smallest index.
Correspondence nearest_neighbor_assignment(const Eigen::MatrixXd& source,
                                           const Eigen::MatrixXd& target);

// round(log-spaced values from k_min to k_max), duplicates removed,
// ascending. Both endpoints are always present.
std::vector<int> level_schedule(int k_min, int k_max, int steps);

// Greedy farthest-point subset of the vertex set, seeded at vertex 0;
// returned indices are sorted ascending.
std::vector<int> farthest_point_sample(const Vertices& vertices, int count);

// Full pairwise matching. Runs Sinkhorn on the init-feature cost, then per
// hierarchy level: deform the source embedding with the current alignment
// (lifted to the level), Sinkhorn on the embedding cost, refit the
// alignment. Outputs: hard nearest-neighbor assignment between the final
// embeddings, registration V + Psi_kmax tau_kmax, and the summed
// unregularized per-level energies as the match loss.
MatchResult hierarchical_match(const Mesh& shape_a, const SpectralBasis& basis_a,
                               const FeatureEmbedding& features_a, const Mesh& shape_b,
                               const SpectralBasis& basis_b, const FeatureEmbedding& features_b,
                               const MatchConfig& config);

}  // namespace meshmatch
