// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/sinkhorn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace meshmatch {

double TransportPlan::marginal_residual() const {
    const double row = (weights.rowwise().sum() - row_marginal).cwiseAbs().maxCoeff();
    const double col = (weights.colwise().sum().transpose() - col_marginal).cwiseAbs().maxCoeff();
    return std::max(row, col);
}

namespace {

// log sum_i exp((num[i] - cost_col[i]) / lambda), max-shifted.
double lse_column(const Eigen::ArrayXd& num, const Eigen::ArrayXd& cost_col, double lambda,
                  Eigen::ArrayXd& scratch) {
    scratch = (num - cost_col) / lambda;
    const double mx = scratch.maxCoeff();
    return std::log((scratch - mx).exp().sum()) + mx;
}

}  // namespace

SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, const Eigen::VectorXd& row_marginal,
                        const Eigen::VectorXd& col_marginal, double entropy_weight,
                        int max_iters, double tol) {
    const int m = static_cast<int>(cost.rows());
    const int n = static_cast<int>(cost.cols());
    if (row_marginal.size() != m || col_marginal.size() != n)
        throw std::invalid_argument("sinkhorn: marginal sizes do not match the cost matrix");
    if (!(entropy_weight > 0.0)) throw std::invalid_argument("sinkhorn: entropy weight must be > 0");
    if ((row_marginal.array() <= 0.0).any() || (col_marginal.array() <= 0.0).any())
        throw std::invalid_argument("sinkhorn: marginals must be strictly positive");
    if (!cost.allFinite()) throw std::invalid_argument("sinkhorn: cost matrix has non-finite entries");

    // Normalize both sides to unit mass.
    const Eigen::ArrayXd r = (row_marginal / row_marginal.sum()).array();
    const Eigen::ArrayXd c = (col_marginal / col_marginal.sum()).array();
    const Eigen::ArrayXd log_r = r.log();
    const Eigen::ArrayXd log_c = c.log();

    // Column-major storage makes column scans contiguous; keep a transposed
    // copy so the row update also walks contiguous memory.
    const Eigen::MatrixXd cost_t = cost.transpose();

    Eigen::ArrayXd f = Eigen::ArrayXd::Zero(m);  // row potentials (units of cost)
    Eigen::ArrayXd g = Eigen::ArrayXd::Zero(n);  // column potentials
    Eigen::ArrayXd scratch_n(n), scratch_m(m);

    const double lambda = entropy_weight;
    SinkhornResult result;
    double residual = std::numeric_limits<double>::infinity();

    int it = 0;
    for (; it < max_iters; ++it) {
        for (int i = 0; i < m; ++i)
            f[i] = lambda * (log_r[i] - lse_column(g, cost_t.col(i).array(), lambda, scratch_n));
        for (int j = 0; j < n; ++j)
            g[j] = lambda * (log_c[j] - lse_column(f, cost.col(j).array(), lambda, scratch_m));

        // After the g update the column sums are exact; only rows can drift.
        residual = 0.0;
        for (int i = 0; i < m; ++i) {
            const double row_sum =
                std::exp(f[i] / lambda + lse_column(g, cost_t.col(i).array(), lambda, scratch_n));
            residual = std::max(residual, std::abs(row_sum - r[i]));
        }
        if (!std::isfinite(residual))
            throw std::runtime_error(
                "sinkhorn: potentials diverged; increase the entropy weight");
        if (residual <= tol) {
            ++it;
            result.converged = true;
            break;
        }
    }

    result.iterations = it;
    result.residual = residual;
    result.plan.row_marginal = r.matrix();
    result.plan.col_marginal = c.matrix();
    result.plan.weights.resize(m, n);
    for (int j = 0; j < n; ++j)
        result.plan.weights.col(j) = ((f + g[j] - cost.col(j).array()) / lambda).exp().matrix();
    return result;
}

SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, double entropy_weight, int max_iters,
                        double tol) {
    return sinkhorn(cost,
                    Eigen::VectorXd::Constant(cost.rows(), 1.0 / static_cast<double>(cost.rows())),
                    Eigen::VectorXd::Constant(cost.cols(), 1.0 / static_cast<double>(cost.cols())),
                    entropy_weight, max_iters, tol);
}

}  // namespace meshmatch
