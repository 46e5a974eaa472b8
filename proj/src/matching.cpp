// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/matching.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace meshmatch {

void MatchConfig::validate(int cached_basis_size) const {
    if (k_min < 1 || k_min > k_max)
        throw std::invalid_argument("match config: need 1 <= k_min <= k_max");
    if (k_max > cached_basis_size)
        throw std::invalid_argument("match config: k_max = " + std::to_string(k_max) +
                                    " exceeds cached basis size " +
                                    std::to_string(cached_basis_size));
    if (schedule_steps < 2 && k_min != k_max)
        throw std::invalid_argument("match config: schedule needs at least 2 steps");
    if (!(entropy_weight > 0.0))
        throw std::invalid_argument("match config: entropy weight must be > 0");
    if (sinkhorn_iters < 1) throw std::invalid_argument("match config: sinkhorn_iters must be >= 1");
}

double match_energy(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, const TransportPlan& plan) {
    if (f.cols() != g.cols())
        throw std::invalid_argument("match_energy: feature dimensions disagree");
    if (plan.weights.rows() != f.rows() || plan.weights.cols() != g.rows())
        throw std::invalid_argument("match_energy: plan shape does not match the features");
    double energy = 0.0;
    for (int i = 0; i < f.rows(); ++i) {
        for (int j = 0; j < g.rows(); ++j) {
            const double w = plan.weights(i, j);
            if (w != 0.0) energy += w * (f.row(i) - g.row(j)).squaredNorm();
        }
    }
    return energy;
}

double match_energy(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                    const Correspondence& corr) {
    if (f.cols() != g.cols())
        throw std::invalid_argument("match_energy: feature dimensions disagree");
    if (corr.size() != f.rows())
        throw std::invalid_argument("match_energy: correspondence size does not match the features");
    double energy = 0.0;
    for (int i = 0; i < f.rows(); ++i) {
        const int j = corr(i);
        if (j < 0 || j >= g.rows())
            throw std::invalid_argument("match_energy: correspondence index out of range");
        energy += (f.row(i) - g.row(j)).squaredNorm();
    }
    return energy;
}

double plan_entropy(const TransportPlan& plan) {
    double h = 0.0;
    const double* p = plan.weights.data();
    const auto count = plan.weights.size();
    for (Eigen::Index i = 0; i < count; ++i)
        if (p[i] > 0.0) h += p[i] * std::log(p[i]);
    return h;
}

Eigen::MatrixXd pairwise_squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("pairwise_squared_distances: dimensions disagree");
    const Eigen::VectorXd a2 = a.rowwise().squaredNorm();
    const Eigen::VectorXd b2 = b.rowwise().squaredNorm();
    Eigen::MatrixXd d = -2.0 * a * b.transpose();
    d.colwise() += a2;
    d.rowwise() += b2.transpose();
    return d.cwiseMax(0.0);
}

Correspondence nearest_neighbor_assignment(const Eigen::MatrixXd& source,
                                           const Eigen::MatrixXd& target) {
    if (source.cols() != target.cols())
        throw std::invalid_argument("nearest_neighbor_assignment: dimensions disagree");
    // ||s - t||^2 up to the constant ||s||^2; minCoeff keeps the first
    // (smallest-index) minimizer, which is the documented tie-break.
    const Eigen::VectorXd t2 = target.rowwise().squaredNorm();
    Correspondence corr;
    corr.target_index.resize(static_cast<size_t>(source.rows()));
    Eigen::VectorXd row(target.rows());
    for (int i = 0; i < source.rows(); ++i) {
        row = t2 - 2.0 * (target * source.row(i).transpose());
        int arg = 0;
        row.minCoeff(&arg);
        corr.target_index[static_cast<size_t>(i)] = arg;
    }
    return corr;
}

std::vector<int> level_schedule(int k_min, int k_max, int steps) {
    if (k_min < 1 || k_min > k_max) throw std::invalid_argument("level_schedule: bad bounds");
    if (steps < 1) throw std::invalid_argument("level_schedule: steps must be >= 1");
    std::vector<int> levels;
    if (k_min == k_max || steps == 1) {
        levels.push_back(k_min == k_max ? k_min : k_max);
        return levels;
    }
    const double log_lo = std::log(static_cast<double>(k_min));
    const double log_hi = std::log(static_cast<double>(k_max));
    for (int t = 0; t < steps; ++t) {
        const double x = log_lo + (log_hi - log_lo) * t / (steps - 1);
        const int k = static_cast<int>(std::lround(std::exp(x)));
        if (levels.empty() || k > levels.back()) levels.push_back(k);
    }
    return levels;
}

std::vector<int> farthest_point_sample(const Vertices& vertices, int count) {
    const int m = static_cast<int>(vertices.rows());
    if (count < 1 || count > m)
        throw std::invalid_argument("farthest_point_sample: count outside [1, m]");
    std::vector<int> picked;
    picked.reserve(static_cast<size_t>(count));
    Eigen::VectorXd dist = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    int current = 0;  // deterministic seed
    for (int c = 0; c < count; ++c) {
        picked.push_back(current);
        dist = dist.cwiseMin((vertices.rowwise() - vertices.row(current)).rowwise().squaredNorm());
        dist.maxCoeff(&current);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
    return out;
}

constexpr double kFitDamping = 1e-9;

// Weighted normal-equation solve shared by the functional map and the
// displacement fit. Minimizes sum_i w_i ||psi_i x - rhs_i||^2 + eps ||x||^2.
Eigen::MatrixXd damped_weighted_solve(const Eigen::MatrixXd& psi, const Eigen::VectorXd& weights,
                                      const Eigen::MatrixXd& rhs) {
    const Eigen::MatrixXd psi_w = weights.asDiagonal() * psi;
    Eigen::MatrixXd gram = psi.transpose() * psi_w;
    gram.diagonal().array() += kFitDamping;
    const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fit_alignment: normal equations are rank deficient");
    Eigen::MatrixXd x = solver.solve(psi_w.transpose() * rhs);
    if (!x.allFinite()) throw std::runtime_error("fit_alignment: non-finite least-squares solution");
    return x;
}

AlignmentParams fit_alignment_rows(const Eigen::MatrixXd& plan_weights,
                                   const Eigen::MatrixXd& psi_src,
                                   const Eigen::MatrixXd& smoothed_src,
                                   const Eigen::MatrixXd& psi_tgt,
                                   const Eigen::MatrixXd& smoothed_tgt) {
    const Eigen::VectorXd row_mass = plan_weights.rowwise().sum();
    if ((row_mass.array() <= 0.0).any())
        throw std::runtime_error("fit_alignment: plan has an empty row");

    // Pull target quantities to the source side via the row-normalized plan.
    const Eigen::MatrixXd transfer = row_mass.asDiagonal().inverse() * plan_weights;
    const Eigen::MatrixXd psi_bar = transfer * psi_tgt;
    const Eigen::MatrixXd coord_bar = transfer * smoothed_tgt;

    AlignmentParams params;
    params.map_c = damped_weighted_solve(psi_src, row_mass, psi_bar).transpose();
    params.tau = damped_weighted_solve(psi_src, row_mass, coord_bar - smoothed_src);
    return params;
}

AlignmentParams lift_alignment(const AlignmentParams& params, int k) {
    const int k0 = params.level();
    if (k == k0) return params;
    AlignmentParams out;
    out.map_c = Eigen::MatrixXd::Identity(k, k);
    out.map_c.topLeftCorner(k0, k0) = params.map_c;
    out.tau = Eigen::MatrixXd::Zero(k, 3);
    out.tau.topRows(k0) = params.tau;
    return out;
}

struct EnergyParts {
    double matching = 0.0;
    double entropy = 0.0;

    double regularized(double entropy_weight) const { return matching + entropy_weight * entropy; }
};

EnergyParts energies(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                     const TransportPlan& plan) {
    return {match_energy(f, g, plan), plan_entropy(plan)};
}

}  // namespace

AlignmentParams fit_alignment(const TransportPlan& plan, const ShellEmbedding& source,
                              const ShellEmbedding& target) {
    if (source.level != target.level)
        throw std::invalid_argument("fit_alignment: embeddings are at different levels");
    if (plan.weights.rows() != source.rows() || plan.weights.cols() != target.rows())
        throw std::invalid_argument("fit_alignment: plan shape does not match the embeddings");
    return fit_alignment_rows(plan.weights, source.spectral_part, source.smoothed,
                              target.spectral_part, target.smoothed);
}

MatchResult hierarchical_match(const Mesh& shape_a, const SpectralBasis& basis_a,
                               const FeatureEmbedding& features_a, const Mesh& shape_b,
                               const SpectralBasis& basis_b, const FeatureEmbedding& features_b,
                               const MatchConfig& config) {
    config.validate(std::min(basis_a.size(), basis_b.size()));
    if (features_a.dimension() != features_b.dimension())
        throw std::invalid_argument("hierarchical_match: init feature dimensions disagree");
    if (features_a.features.rows() != shape_a.num_vertices() ||
        features_b.features.rows() != shape_b.num_vertices())
        throw std::invalid_argument("hierarchical_match: init feature rows do not match the meshes");

    const std::vector<int> schedule = level_schedule(config.k_min, config.k_max,
                                                     config.schedule_steps);
    const int m = shape_a.num_vertices();
    const int n = shape_b.num_vertices();

    // Optional farthest-point restriction of the transport problem. The
    // final assignment and registration are always computed on all vertices.
    std::vector<int> rows_a(static_cast<size_t>(m)), rows_b(static_cast<size_t>(n));
    std::iota(rows_a.begin(), rows_a.end(), 0);
    std::iota(rows_b.begin(), rows_b.end(), 0);
    if (config.subsample > 0 && m > config.subsample)
        rows_a = farthest_point_sample(shape_a.vertices, config.subsample);
    if (config.subsample > 0 && n > config.subsample)
        rows_b = farthest_point_sample(shape_b.vertices, config.subsample);

    auto marginal = [&](const SpectralBasis& basis, const std::vector<int>& rows) {
        Eigen::VectorXd w(static_cast<Eigen::Index>(rows.size()));
        if (config.area_weighted_marginals) {
            for (size_t r = 0; r < rows.size(); ++r)
                w[static_cast<Eigen::Index>(r)] = basis.mass_diagonal[rows[r]];
        } else {
            w.setOnes();
        }
        return (w / w.sum()).eval();
    };
    const Eigen::VectorXd marg_a = marginal(basis_a, rows_a);
    const Eigen::VectorXd marg_b = marginal(basis_b, rows_b);

    auto run_sinkhorn = [&](const Eigen::MatrixXd& cost) {
        return sinkhorn(cost, marg_a, marg_b, config.entropy_weight, config.sinkhorn_iters,
                        config.sinkhorn_tol)
            .plan;
    };

    // Step 0: transport on the init-feature cost seeds the first alignment.
    TransportPlan plan = run_sinkhorn(pairwise_squared_distances(
        take_rows(features_a.features, rows_a), take_rows(features_b.features, rows_b)));

    const int k_first = schedule.front();
    ShellEmbedding shell_a = shell_embedding(shape_a, basis_a, k_first);
    ShellEmbedding shell_b = shell_embedding(shape_b, basis_b, k_first);
    AlignmentParams params = fit_alignment_rows(
        plan.weights, take_rows(shell_a.spectral_part, rows_a), take_rows(shell_a.smoothed, rows_a),
        take_rows(shell_b.spectral_part, rows_b), take_rows(shell_b.smoothed, rows_b));

    MatchResult result;
    result.per_level_energy.reserve(schedule.size());

    for (int k : schedule) {
        if (k != k_first) {
            shell_a = shell_embedding(shape_a, basis_a, k);
            shell_b = shell_embedding(shape_b, basis_b, k);
        }
        params = lift_alignment(params, k);

        // (a) Deform the source embedding; the normals computed here stay
        // frozen for this level's energy bookkeeping.
        const ShellEmbedding deformed = deformed_embedding(shell_a, params.map_c, params.tau);
        const Eigen::MatrixXd psi_src = take_rows(shell_a.spectral_part, rows_a);
        const Eigen::MatrixXd smoothed_src = take_rows(shell_a.smoothed, rows_a);
        const Eigen::MatrixXd psi_tgt = take_rows(shell_b.spectral_part, rows_b);
        const Eigen::MatrixXd smoothed_tgt = take_rows(shell_b.smoothed, rows_b);
        const Eigen::MatrixXd normals_src = take_rows(deformed.normals, rows_a);
        const Eigen::MatrixXd stacked_tgt = take_rows(shell_b.stacked(), rows_b);

        auto stack_src = [&](const AlignmentParams& p) {
            Eigen::MatrixXd s(psi_src.rows(), k + 6);
            s.leftCols(k) = psi_src * p.map_c.transpose();
            s.middleCols(k, 3) = smoothed_src + psi_src * p.tau;
            s.rightCols(3) = normals_src;
            return s;
        };
        const Eigen::MatrixXd stacked_src = stack_src(params);

        LevelTrace trace;
        trace.level = k;
        if (config.record_trace)
            trace.energy_initial =
                energies(stacked_src, stacked_tgt, plan).regularized(config.entropy_weight);

        // (b) Transport on the embedding cost.
        plan = run_sinkhorn(pairwise_squared_distances(stacked_src, stacked_tgt));
        const EnergyParts level_energy = energies(stacked_src, stacked_tgt, plan);
        result.per_level_energy.push_back(level_energy.matching);
        if (config.record_trace)
            trace.energy_after_sinkhorn = level_energy.regularized(config.entropy_weight);

        // (c) Refit the alignment at the fixed plan.
        params = fit_alignment_rows(plan.weights, psi_src, smoothed_src, psi_tgt, smoothed_tgt);
        if (config.record_trace) {
            trace.energy_after_fit =
                energies(stack_src(params), stacked_tgt, plan).regularized(config.entropy_weight);
            result.trace.push_back(trace);
        }
    }

    const int k_max = schedule.back();
    const ShellEmbedding final_a = deformed_embedding(shell_a, params.map_c, params.tau);
    result.pi = nearest_neighbor_assignment(final_a.stacked(), shell_b.stacked());
    result.registration =
        shape_a.vertices + basis_a.eigenfunctions.leftCols(k_max) * params.tau;
    result.final_alignment = params;
    result.match_loss =
        std::accumulate(result.per_level_energy.begin(), result.per_level_energy.end(), 0.0);
    return result;
}

}  // namespace meshmatch
