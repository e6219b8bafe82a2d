#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semspec/common.hpp"
#include "semspec/graph.hpp"
#include "semspec/spectral.hpp"

namespace semspec {

inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Damped per-mode weights eta_i = e^{-tau lambda_i} w_i feeding the
/// partition and distortion formulas.
struct ModeMass {
    Eigen::VectorXd eta;
    Eigen::VectorXd w;
    double tau = 0.0;

    int size() const { return static_cast<int>(eta.size()); }
};

inline ModeMass mode_mass(const Spectrum& s, const Eigen::VectorXd& weights,
                          double tau) {
    require(weights.size() == s.eigenvalues.size(),
            "mode_mass: weight vector length mismatch");
    require(weights.minCoeff() >= 0.0, "mode_mass: negative weight");
    ModeMass m;
    m.w = weights;
    m.tau = tau;
    m.eta = ((-tau * s.eigenvalues.array()).exp() * weights.array()).matrix();
    return m;
}

/// Per-mode half-widths of the plausibility interval [-c_i, c_i]. An
/// infinite half-width removes the restriction for that mode.
struct PlausibilityBand {
    Eigen::VectorXd c;

    static PlausibilityBand uniform(int n, double half_width = 1.0) {
        PlausibilityBand b;
        b.c = Eigen::VectorXd::Constant(n, half_width);
        return b;
    }

    void validate() const {
        require(c.size() > 0, "plausibility band is empty");
        for (Eigen::Index i = 0; i < c.size(); ++i)
            require(c[i] > 0.0, "band half-width " + std::to_string(i) + " must be > 0");
    }
};

/// Energy split by interaction class. `total` must equal the sum of parts.
struct EnergyBreakdown {
    std::map<Modality, double> intra;
    std::map<std::pair<Modality, Modality>, double> cross;
    double joint = 0.0;
    double total = 0.0;

    double parts_sum() const {
        double s = joint;
        for (const auto& [m, v] : intra) s += v;
        for (const auto& [mm, v] : cross) s += v;
        return s;
    }
    void finalize() { total = parts_sum(); }
    void validate() const {
        require(std::abs(total - parts_sum()) <= 1e-12,
                "energy breakdown total does not match its parts");
    }
};

// ---------------------------------------------------------------------------
// Class energies
// ---------------------------------------------------------------------------

/// Squared feature distance within one class RKHS.
inline double intra_energy(const Eigen::VectorXd& coeffs_x,
                           const Eigen::VectorXd& coeffs_p) {
    require(coeffs_x.size() == coeffs_p.size(), "intra_energy: length mismatch");
    return (coeffs_x - coeffs_p).squaredNorm();
}

/// Prompt-conditioned cross-class bias: the output alignment inner product
/// measured against the prompt baseline. Negative when the outputs align
/// better than the prompt does.
inline double cross_energy(const Eigen::VectorXd& coeffs_x_m,
                           const Eigen::VectorXd& coeffs_x_m2,
                           const Eigen::VectorXd& coeffs_p_m,
                           const Eigen::VectorXd& coeffs_p_m2) {
    const Eigen::Index n = coeffs_x_m.size();
    require(coeffs_x_m2.size() == n && coeffs_p_m.size() == n && coeffs_p_m2.size() == n,
            "cross_energy: length mismatch");
    return -coeffs_x_m.dot(coeffs_x_m2) + coeffs_p_m.dot(coeffs_p_m2);
}

enum class JointForm {
    Raw,      // -prod_M <Phi_M(x), Phi_M(p)>
    Anchored  // raw + prod_M ||Phi_M(p)||^2, so perfect alignment gives 0
};

/// Inner product of the elementary output tensor against the prompt anchor;
/// factorizes into a product of per-modality inner products.
inline double joint_energy(const std::map<Modality, Eigen::VectorXd>& coeffs_x,
                           const std::map<Modality, Eigen::VectorXd>& coeffs_p,
                           JointForm form = JointForm::Anchored) {
    require(!coeffs_x.empty(), "joint_energy: no modalities");
    require(coeffs_x.size() == coeffs_p.size(), "joint_energy: modality set mismatch");
    double prod = 1.0, anchor = 1.0;
    for (const auto& [m, cx] : coeffs_x) {
        auto it = coeffs_p.find(m);
        require(it != coeffs_p.end(), "joint_energy: modality set mismatch");
        require(cx.size() == it->second.size(), "joint_energy: length mismatch");
        prod *= cx.dot(it->second);
        anchor *= it->second.squaredNorm();
    }
    return form == JointForm::Raw ? -prod : -prod + anchor;
}

/// Node-centric total: sum_i w_i e^{-tau lambda_i} |dphi_i|^2, with the
/// aggregated per-node weights applied positionally to the modes.
inline double total_spectral_energy(const Spectrum& s, const Eigen::VectorXd& weights,
                                    double tau, int x, int p) {
    check_node(s, x, "total_spectral_energy");
    check_node(s, p, "total_spectral_energy");
    require(weights.size() == s.eigenvalues.size(),
            "total_spectral_energy: weight vector length mismatch");
    require(weights.minCoeff() >= 0.0, "total_spectral_energy: negative weight");
    if (x == p) return 0.0;
    const Eigen::ArrayXd dphi =
        (s.eigenvectors.row(x) - s.eigenvectors.row(p)).transpose().array();
    return (weights.array() * (-tau * s.eigenvalues.array()).exp() * dphi.square())
        .sum();
}

// ---------------------------------------------------------------------------
// Gaussian partition functions and semantic distortion
// ---------------------------------------------------------------------------

struct LogPartition {
    double value = 0.0;
    int excluded_modes = 0;  // modes with w_i = 0, whose integral diverges
};

/// Unconstrained Gaussian log-partition (1/2) sum_i log(pi T / eta_i) over
/// the modes with positive mass.
inline LogPartition log_partition_gaussian(const ModeMass& mass, double temperature) {
    require(temperature > 0.0, "log_partition_gaussian: temperature must be > 0");
    LogPartition out;
    for (int i = 0; i < mass.size(); ++i) {
        if (mass.w[i] == 0.0) {
            ++out.excluded_modes;
            continue;
        }
        require(mass.eta[i] > 0.0, "log_partition_gaussian: nonpositive mode mass");
        out.value += 0.5 * std::log(kPi * temperature / mass.eta[i]);
    }
    return out;
}

inline LogPartition log_partition_gaussian(const Spectrum& s,
                                           const Eigen::VectorXd& weights, double tau,
                                           double temperature) {
    return log_partition_gaussian(mode_mass(s, weights, tau), temperature);
}

/// log erf(z) for z > 0, finite for every positive argument. Large z routes
/// through erfc and log1p so the 1 - epsilon cancellation never happens.
inline double log_erf(double z) {
    require(z > 0.0, "log_erf: argument must be > 0");
    if (z < 0.5) return std::log(std::erf(z));
    return std::log1p(-std::erfc(z));
}

/// Band-restricted Gaussian log-partition: each positive-mass mode gains a
/// factor erf(c_i sqrt(eta_i / T)) from the truncated integral.
inline LogPartition log_partition_gaussian_banded(const ModeMass& mass,
                                                  const PlausibilityBand& band,
                                                  double temperature) {
    require(temperature > 0.0, "log_partition_gaussian_banded: temperature must be > 0");
    require(band.c.size() == mass.eta.size(),
            "log_partition_gaussian_banded: band length mismatch");
    band.validate();
    LogPartition out;
    for (int i = 0; i < mass.size(); ++i) {
        if (mass.w[i] == 0.0) {
            ++out.excluded_modes;
            continue;
        }
        require(mass.eta[i] > 0.0, "log_partition_gaussian_banded: nonpositive mode mass");
        out.value += 0.5 * std::log(kPi * temperature / mass.eta[i]) +
                     log_erf(band.c[i] * std::sqrt(mass.eta[i] / temperature));
    }
    return out;
}

struct FreeEnergyGap {
    double d_sem = 0.0;       // logZ over the full space minus logZ restricted
    double free_energy = 0.0; // temperature times d_sem
};

inline FreeEnergyGap free_energy_gap(double log_z_full, double log_z_restricted,
                                     double temperature) {
    require(temperature > 0.0, "free_energy_gap: temperature must be > 0");
    FreeEnergyGap out;
    out.d_sem = log_z_full - log_z_restricted;
    out.free_energy = temperature * out.d_sem;
    return out;
}

/// Closed-form semantic distortion -sum_i log erf(c_i sqrt(eta_i / T)),
/// evaluated mode-wise in log space. Nonnegative; equals the gap between
/// the unconstrained and band-restricted log-partitions.
inline double semantic_distortion_closed(const ModeMass& mass,
                                         const PlausibilityBand& band,
                                         double temperature) {
    require(temperature > 0.0, "semantic_distortion_closed: temperature must be > 0");
    require(band.c.size() == mass.eta.size(),
            "semantic_distortion_closed: band length mismatch");
    band.validate();
    double acc = 0.0;
    for (int i = 0; i < mass.size(); ++i) {
        require(mass.eta[i] > 0.0, "semantic_distortion_closed: nonpositive mode mass");
        acc -= log_erf(band.c[i] * std::sqrt(mass.eta[i] / temperature));
    }
    return acc;
}

/// Least-squares slope of distortion against ln T. Approaches half the mode
/// count when every T in the grid dwarfs every eta_i.
inline double high_temperature_slope(
    const std::vector<std::pair<double, double>>& samples) {
    require(samples.size() >= 3, "high_temperature_slope: need at least 3 samples");
    double mx = 0.0, my = 0.0;
    for (const auto& [t, d] : samples) {
        require(t > 0.0, "high_temperature_slope: temperatures must be > 0");
        mx += std::log(t);
        my += d;
    }
    mx /= static_cast<double>(samples.size());
    my /= static_cast<double>(samples.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [t, d] : samples) {
        const double dx = std::log(t) - mx;
        sxx += dx * dx;
        sxy += dx * (d - my);
    }
    require(sxx > 0.0, "high_temperature_slope: degenerate temperature grid");
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Hallucination energy
// ---------------------------------------------------------------------------

/// Energy carried by the selected modes only.
inline double hallucination_energy_modes(const Spectrum& s,
                                         const std::set<int>& hallucinated_modes,
                                         const Eigen::VectorXd& weights, double tau,
                                         int x, int p) {
    check_node(s, x, "hallucination_energy_modes");
    check_node(s, p, "hallucination_energy_modes");
    require(weights.size() == s.eigenvalues.size(),
            "hallucination_energy_modes: weight vector length mismatch");
    double acc = 0.0;
    for (int i : hallucinated_modes) {
        require(i >= 0 && i < s.source_dim,
                "hallucination_energy_modes: mode " + std::to_string(i) + " out of range");
        const double dphi = s.eigenvectors(x, i) - s.eigenvectors(p, i);
        acc += std::exp(-tau * s.eigenvalues[i]) * weights[i] * dphi * dphi;
    }
    return acc;
}

/// Normalized quadratic form of the damped-spectra difference: dphi^T
/// (e^{-tau Lambda_full} - e^{-tau Lambda_plausible}) dphi / ||dphi||^2,
/// with the plausible spectrum zero-padded to full length.
inline double hallucination_energy_rayleigh(const Eigen::VectorXd& lambda_full,
                                            const Eigen::VectorXd& lambda_plausible_padded,
                                            const ModeCoefficients& delta_phi,
                                            double tau) {
    require(lambda_full.size() == lambda_plausible_padded.size(),
            "hallucination_energy_rayleigh: spectra lengths differ");
    require(delta_phi.values.size() == lambda_full.size(),
            "hallucination_energy_rayleigh: coefficient length mismatch");
    const double nrm = delta_phi.squared_norm();
    require(nrm > 0.0, "hallucination_energy_rayleigh: zero coefficient vector");
    const Eigen::ArrayXd diff = (-tau * lambda_full.array()).exp() -
                                (-tau * lambda_plausible_padded.array()).exp();
    return (diff * delta_phi.values.array().square()).sum() / nrm;
}

/// Zero-pads a plausible-subgraph spectrum to the full dimension: missing
/// modes get eigenvalue 0, the conservative completion under e^{-tau x}.
inline Eigen::VectorXd pad_spectrum(const Eigen::VectorXd& lambda_plausible,
                                    int full_dim) {
    require(static_cast<int>(lambda_plausible.size()) <= full_dim,
            "pad_spectrum: subgraph spectrum longer than full spectrum");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(full_dim);
    out.head(lambda_plausible.size()) = lambda_plausible;
    return out;
}

/// A mode belongs to the hallucination region when more than `threshold` of
/// its squared eigenvector mass sits outside the plausible node set.
inline std::set<int> assign_modes_to_hallucination_region(
    const Spectrum& s, const std::set<int>& plausible_nodes, double threshold = 0.5) {
    require(!plausible_nodes.empty(),
            "assign_modes_to_hallucination_region: empty plausible set");
    require(static_cast<int>(plausible_nodes.size()) < s.source_dim,
            "assign_modes_to_hallucination_region: plausible set covers every node");
    require(threshold > 0.0 && threshold <= 1.0,
            "assign_modes_to_hallucination_region: threshold must be in (0, 1]");
    for (int v : plausible_nodes)
        require(v >= 0 && v < s.source_dim,
                "assign_modes_to_hallucination_region: unknown node " + std::to_string(v));

    std::set<int> out;
    for (int i = 0; i < s.source_dim; ++i) {
        double outside = 0.0;
        for (int v = 0; v < s.source_dim; ++v)
            if (!plausible_nodes.count(v))
                outside += s.eigenvectors(v, i) * s.eigenvectors(v, i);
        if (outside > threshold) out.insert(i);
    }
    return out;
}

} // namespace semspec
