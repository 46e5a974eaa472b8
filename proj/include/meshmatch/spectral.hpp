// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Truncated Laplace-Beltrami eigenbasis, spectral smoothing, shell feature
// embeddings, and the wave kernel signature used to seed matching.

#pragma once

#include "meshmatch/geometry.hpp"
#include "meshmatch/operators.hpp"

#include <Eigen/Core>

namespace meshmatch {

struct SpectralBasis {
    Eigen::MatrixXd eigenfunctions;  // m x k, M-orthonormal columns
    Eigen::VectorXd eigenvalues;     // k nonnegative values, ascending
    Eigen::VectorXd mass_diagonal;   // lumped areas of the mesh the basis belongs to

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

// k smallest eigenpairs of S psi = lambda M psi. Solved densely through the
// M^(-1/2) similarity transform (M is diagonal), which keeps the problem
// symmetric. Eigenvector signs are fixed by making the largest-magnitude
// entry positive so cached bases are reproducible.
SpectralBasis eigendecomposition(const MassMatrix& mass, const StiffnessMatrix& stiffness, int k);

// Low-pass reconstruction from the first k spectral coefficients:
// Psi_k Psi_k^T M signal. A projection in the M inner product.
Eigen::MatrixXd smooth(const SpectralBasis& basis, const Eigen::MatrixXd& signal, int k);

// Per-vertex feature stack at hierarchy level k: eigenfunctions, smoothed
// coordinates, and normals of the smoothed geometry. Concatenated width is
// k + 6. The mesh pointer is non-owning; callers keep the mesh alive.
struct ShellEmbedding {
    int level = 0;                                     // k
    Eigen::MatrixXd spectral_part;                     // m x k
    Eigen::Matrix<double, Eigen::Dynamic, 3> smoothed; // m x 3
    Eigen::Matrix<double, Eigen::Dynamic, 3> normals;  // m x 3 (zero where degenerate)
    const Mesh* mesh = nullptr;

    int rows() const { return static_cast<int>(spectral_part.rows()); }
    int width() const { return level + 6; }

    // Dense (k+6)-column stack used as Sinkhorn features.
    Eigen::MatrixXd stacked() const;
};

// Undeformed embedding F(k) = (Psi_k, smoothed coords, their normals).
ShellEmbedding shell_embedding(const Mesh& mesh, const SpectralBasis& basis, int k);

// Affine deformation of an (undeformed) embedding by a functional map C
// (k x k) and displacement coefficients tau (k x 3):
//   Fhat(k) = (Psi_k C^T, smoothed + Psi_k tau, normals of displaced coords).
// Normals are recomputed on the displaced smoothed geometry.
ShellEmbedding deformed_embedding(const ShellEmbedding& embedding, const Eigen::MatrixXd& map_c,
                                  const Eigen::MatrixXd& tau);

struct FeatureEmbedding {
    Eigen::MatrixXd features;  // m x l, finite

    int dimension() const { return static_cast<int>(features.cols()); }
};

// Wave kernel signature over log-energies sampled uniformly on
// [log lambda_2, log lambda_k]. Column t holds, per vertex,
//   sum_j psi_j(v)^2 exp(-(e_t - log lambda_j)^2 / (2 sigma^2))
// normalized by the same sum without psi^2. sigma <= 0 selects the default
// of 7 energy steps. Requires at least one strictly positive eigenvalue.
FeatureEmbedding wks_descriptor(const SpectralBasis& basis, int num_energies, double sigma = 0.0);

}  // namespace meshmatch
