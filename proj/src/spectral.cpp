// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace meshmatch {

SpectralBasis eigendecomposition(const MassMatrix& mass, const StiffnessMatrix& stiffness, int k) {
    const int m = static_cast<int>(mass.diagonal.size());
    if (stiffness.rows() != m || stiffness.cols() != m)
        throw std::invalid_argument("eigendecomposition: operator dimensions disagree");
    if (k < 1 || k > m)
        throw std::invalid_argument("eigendecomposition: k = " + std::to_string(k) +
                                    " outside [1, " + std::to_string(m) + "]");
    if ((mass.diagonal.array() <= 0.0).any())
        throw std::invalid_argument("eigendecomposition: mass matrix must be positive");

    // Similarity transform: B = M^(-1/2) S M^(-1/2) is symmetric with the
    // same eigenvalues; eigenvectors map back via psi = M^(-1/2) y.
    const Eigen::VectorXd inv_sqrt_mass = mass.diagonal.array().rsqrt();
    Eigen::MatrixXd sym = Eigen::MatrixXd(stiffness);
    sym = inv_sqrt_mass.asDiagonal() * sym * inv_sqrt_mass.asDiagonal();
    sym = 0.5 * (sym + sym.transpose()).eval();  // scrub rounding asymmetry

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition: dense symmetric solver failed to converge");

    SpectralBasis basis;
    basis.mass_diagonal = mass.diagonal;
    basis.eigenvalues = solver.eigenvalues().head(k);
    basis.eigenfunctions = inv_sqrt_mass.asDiagonal() * solver.eigenvectors().leftCols(k);

    // Clamp the tiny negative values the constant mode picks up numerically.
    for (int i = 0; i < k; ++i)
        if (basis.eigenvalues[i] < 0.0 && basis.eigenvalues[i] > -1e-9) basis.eigenvalues[i] = 0.0;

    // Deterministic sign: largest-magnitude entry of each eigenvector positive.
    for (int c = 0; c < k; ++c) {
        int arg = 0;
        basis.eigenfunctions.col(c).cwiseAbs().maxCoeff(&arg);
        if (basis.eigenfunctions(arg, c) < 0.0) basis.eigenfunctions.col(c) *= -1.0;
    }
    return basis;
}

Eigen::MatrixXd smooth(const SpectralBasis& basis, const Eigen::MatrixXd& signal, int k) {
    if (k < 1 || k > basis.size())
        throw std::invalid_argument("smooth: level " + std::to_string(k) + " outside [1, " +
                                    std::to_string(basis.size()) + "]");
    if (signal.rows() != basis.eigenfunctions.rows())
        throw std::invalid_argument("smooth: signal row count does not match the basis");
    const auto psi = basis.eigenfunctions.leftCols(k);
    return psi * (psi.transpose() * (basis.mass_diagonal.asDiagonal() * signal));
}

Eigen::MatrixXd ShellEmbedding::stacked() const {
    Eigen::MatrixXd out(rows(), width());
    out.leftCols(level) = spectral_part;
    out.middleCols(level, 3) = smoothed;
    out.rightCols(3) = normals;
    return out;
}

ShellEmbedding shell_embedding(const Mesh& mesh, const SpectralBasis& basis, int k) {
    ShellEmbedding emb;
    emb.level = k;
    emb.mesh = &mesh;
    emb.spectral_part = basis.eigenfunctions.leftCols(k);
    emb.smoothed = smooth(basis, mesh.vertices, k);
    emb.normals = vertex_normals_or_zero(emb.smoothed, mesh.triangles);
    return emb;
}

ShellEmbedding deformed_embedding(const ShellEmbedding& embedding, const Eigen::MatrixXd& map_c,
                                  const Eigen::MatrixXd& tau) {
    const int k = embedding.level;
    if (map_c.rows() != k || map_c.cols() != k)
        throw std::invalid_argument("deformed_embedding: functional map must be " +
                                    std::to_string(k) + " x " + std::to_string(k));
    if (tau.rows() != k || tau.cols() != 3)
        throw std::invalid_argument("deformed_embedding: tau must be " + std::to_string(k) + " x 3");

    ShellEmbedding out;
    out.level = k;
    out.mesh = embedding.mesh;
    out.spectral_part = embedding.spectral_part * map_c.transpose();
    out.smoothed = embedding.smoothed + embedding.spectral_part * tau;
    out.normals = vertex_normals_or_zero(out.smoothed, embedding.mesh->triangles);
    return out;
}

FeatureEmbedding wks_descriptor(const SpectralBasis& basis, int num_energies, double sigma) {
    if (basis.size() < 2) throw std::invalid_argument("wks_descriptor: basis needs k >= 2");
    if (num_energies < 1) throw std::invalid_argument("wks_descriptor: need at least one energy");

    // First strictly positive eigenvalue; the near-zero constant mode (and any
    // additional zero modes on disconnected input) carries no signature.
    int first = -1;
    for (int j = 0; j < basis.size(); ++j) {
        if (basis.eigenvalues[j] > 1e-12) {
            first = j;
            break;
        }
    }
    if (first < 0) throw std::runtime_error("wks_descriptor: all eigenvalues are zero");

    const int m = static_cast<int>(basis.eigenfunctions.rows());
    const int count = basis.size() - first;
    Eigen::VectorXd log_ev(count);
    for (int j = 0; j < count; ++j) log_ev[j] = std::log(basis.eigenvalues[first + j]);

    const double lo = log_ev[0];
    const double hi = log_ev[count - 1];
    const double step = num_energies > 1 ? (hi - lo) / (num_energies - 1) : 0.0;
    if (sigma <= 0.0) sigma = 7.0 * step;
    if (sigma <= 0.0) sigma = 1.0;  // degenerate spectrum (single distinct energy)

    const Eigen::MatrixXd psi_sq = basis.eigenfunctions.rightCols(count).array().square();

    FeatureEmbedding emb;
    emb.features.resize(m, num_energies);
    Eigen::VectorXd gauss(count);
    for (int t = 0; t < num_energies; ++t) {
        const double e = lo + step * t;
        for (int j = 0; j < count; ++j) {
            const double d = e - log_ev[j];
            gauss[j] = std::exp(-d * d / (2.0 * sigma * sigma));
        }
        const double partition = gauss.sum();
        emb.features.col(t) = (psi_sq * gauss) / partition;
    }
    if (!emb.features.allFinite())
        throw std::runtime_error("wks_descriptor: non-finite descriptor values");
    return emb;
}

}  // namespace meshmatch
