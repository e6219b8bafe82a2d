#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "semspec/common.hpp"

namespace semspec {

/// Full eigensystem of a symmetric operator: ascending eigenvalues, columns
/// of `eigenvectors` orthonormal and paired to them.
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    int source_dim = 0;

    double lambda_min() const { return eigenvalues[0]; }
    double lambda_max() const { return eigenvalues[eigenvalues.size() - 1]; }
};

/// Per-mode coefficients of the indicator difference delta_x - delta_p in
/// the eigenbasis. Squared norm is 2 for x != p and 0 for x == p.
struct ModeCoefficients {
    Eigen::VectorXd values;

    double squared_norm() const { return values.squaredNorm(); }
};

/// Dense symmetric eigendecomposition with a reproducible sign convention:
/// the first nonzero component of every eigenvector is made positive.
inline Spectrum eigendecompose(const Eigen::MatrixXd& op) {
    require(op.rows() == op.cols(), "eigendecompose: matrix must be square");
    require(op.allFinite(), "eigendecompose: non-finite entries");
    require((op - op.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
            "eigendecompose: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        0.5 * (op + op.transpose()));
    require(solver.info() == Eigen::Success, "eigendecompose: solver did not converge");

    Spectrum s;
    s.eigenvalues = solver.eigenvalues();  // ascending by construction
    s.eigenvectors = solver.eigenvectors();
    s.source_dim = static_cast<int>(op.rows());
    for (Eigen::Index j = 0; j < s.eigenvectors.cols(); ++j) {
        for (Eigen::Index i = 0; i < s.eigenvectors.rows(); ++i) {
            const double v = s.eigenvectors(i, j);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) s.eigenvectors.col(j) = -s.eigenvectors.col(j);
                break;
            }
        }
    }
    return s;
}

inline void check_node(const Spectrum& s, int node, const char* who) {
    require(node >= 0 && node < s.source_dim,
            std::string(who) + ": node " + std::to_string(node) + " out of range [0, " +
                std::to_string(s.source_dim) + ")");
}

/// Heat kernel K = sum_i e^{-tau lambda_i} u_i u_i^T. tau = 0 gives the
/// identity; tau must not be negative.
inline Eigen::MatrixXd diffusion_kernel(const Spectrum& s, double tau) {
    require(tau >= 0.0, "diffusion_kernel: tau must be >= 0");
    const Eigen::VectorXd damp = (-tau * s.eigenvalues.array()).exp();
    Eigen::MatrixXd k = s.eigenvectors * damp.asDiagonal() * s.eigenvectors.transpose();
    return 0.5 * (k + k.transpose());
}

/// RKHS feature coefficients of one node: entry i = e^{-tau lambda_i/2} u_i(node).
/// Inner products of these vectors reproduce kernel entries.
inline Eigen::VectorXd feature_coefficients(const Spectrum& s, double tau, int node) {
    require(tau >= 0.0, "feature_coefficients: tau must be >= 0");
    check_node(s, node, "feature_coefficients");
    return ((-0.5 * tau * s.eigenvalues.array()).exp() *
            s.eigenvectors.row(node).transpose().array())
        .matrix();
}

inline ModeCoefficients mode_coefficients(const Spectrum& s, int x, int p) {
    check_node(s, x, "mode_coefficients");
    check_node(s, p, "mode_coefficients");
    ModeCoefficients mc;
    mc.values = (s.eigenvectors.row(x) - s.eigenvectors.row(p)).transpose();
    return mc;
}

/// Squared RKHS distance sum_i e^{-tau lambda_i} (u_i(x) - u_i(p))^2.
inline double rkhs_distance_sq(const Spectrum& s, double tau, int x, int p) {
    require(tau >= 0.0, "rkhs_distance_sq: tau must be >= 0");
    check_node(s, x, "rkhs_distance_sq");
    check_node(s, p, "rkhs_distance_sq");
    if (x == p) return 0.0;
    const Eigen::ArrayXd diff =
        (s.eigenvectors.row(x) - s.eigenvectors.row(p)).transpose().array();
    return ((-tau * s.eigenvalues.array()).exp() * diff.square()).sum();
}

} // namespace semspec
