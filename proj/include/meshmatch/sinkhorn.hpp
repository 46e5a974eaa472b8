// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Entropy-regularized optimal transport. The solver runs in the log domain
// (potentials instead of scalings), which stays finite for the small entropy
// weights this pipeline uses, where exp(-cost/lambda) underflows to zero.

#pragma once

#include <Eigen/Core>

namespace meshmatch {

struct TransportPlan {
    Eigen::MatrixXd weights;       // m x n, entries >= 0
    Eigen::VectorXd row_marginal;  // m positive weights, sums to 1
    Eigen::VectorXd col_marginal;  // n positive weights, sums to 1

    // Largest absolute row/column-sum deviation from the marginals.
    double marginal_residual() const;
};

struct SinkhornResult {
    TransportPlan plan;
    int iterations = 0;
    double residual = 0.0;  // marginal residual at exit
    bool converged = false;
};

// Minimizes <cost, P> + entropy_weight * sum P log P over couplings with
// the given marginals. The optimum has the form diag(u) exp(-cost/lambda)
// diag(v). Stops once the marginal residual drops below `tol` or after
// `max_iters` iterations (reported via SinkhornResult::converged).
//
// Marginals must be strictly positive and sum to the same total mass;
// both are normalized to 1 internally.
SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, const Eigen::VectorXd& row_marginal,
                        const Eigen::VectorXd& col_marginal, double entropy_weight,
                        int max_iters, double tol);

// Uniform-marginal convenience overload.
SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, double entropy_weight, int max_iters,
                        double tol);

}  // namespace meshmatch
