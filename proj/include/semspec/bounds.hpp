#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "semspec/common.hpp"
#include "semspec/energy.hpp"
#include "semspec/spectral.hpp"

namespace semspec {

// Absolute slack allowed on either side of a sandwich bound.
inline constexpr double kBoundTolerance = 1e-9;

struct SandwichBound {
    double lower = 0.0;
    double upper = 0.0;
    double value = 0.0;
    bool satisfied = false;
    double slack_lower = 0.0;  // value - lower
    double slack_upper = 0.0;  // upper - value
};

inline SandwichBound make_sandwich(double lower, double upper, double value) {
    SandwichBound b;
    b.lower = lower;
    b.upper = upper;
    b.value = value;
    b.slack_lower = value - lower;
    b.slack_upper = upper - value;
    b.satisfied = lower - kBoundTolerance <= value && value <= upper + kBoundTolerance;
    return b;
}

/// v^T A v / v^T v for symmetric A; always within [lambda_min, lambda_max].
inline double rayleigh_quotient(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
    require(a.rows() == a.cols(), "rayleigh_quotient: matrix must be square");
    require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
            "rayleigh_quotient: matrix is not symmetric");
    require(v.size() == a.rows(), "rayleigh_quotient: vector length mismatch");
    const double nrm = v.squaredNorm();
    require(nrm > 0.0, "rayleigh_quotient: zero vector");
    return v.dot(a * v) / nrm;
}

/// The damped-energy bound in two readings. `corrected` bounds the quadratic
/// form of the operator actually applied, e^{-tau Lambda}:
///   e^{-tau lambda_max} ||dphi||^2 <= value <= e^{-tau lambda_min} ||dphi||^2.
/// `literal` is the eigenvalue-scaled variant lambda_min ||dphi||^2 <= value
/// <= lambda_max ||dphi||^2, which fails for large tau; it is reported for
/// comparison but carries no guarantee.
struct EnergySandwich {
    SandwichBound corrected;
    SandwichBound literal;
};

inline EnergySandwich sandwich_for_energy(const Spectrum& block,
                                          const ModeCoefficients& delta_phi, double tau,
                                          double energy_value) {
    require(tau >= 0.0, "sandwich_for_energy: tau must be >= 0");
    require(delta_phi.values.size() == block.eigenvalues.size(),
            "sandwich_for_energy: coefficient length mismatch");
    const double nrm = delta_phi.squared_norm();
    require(nrm > 0.0, "sandwich_for_energy: zero coefficient vector");
    EnergySandwich out;
    out.corrected = make_sandwich(std::exp(-tau * block.lambda_max()) * nrm,
                                  std::exp(-tau * block.lambda_min()) * nrm,
                                  energy_value);
    out.literal = make_sandwich(block.lambda_min() * nrm, block.lambda_max() * nrm,
                                energy_value);
    return out;
}

/// Bound for the damped-difference quadratic form: the operator is diagonal
/// with entries e^{-tau lambda_full_i} - e^{-tau lambda_plausible_i}, so its
/// extreme diagonal entries bracket the normalized value.
inline SandwichBound sandwich_for_difference(const Eigen::VectorXd& lambda_full,
                                             const Eigen::VectorXd& lambda_plausible_padded,
                                             const ModeCoefficients& delta_phi,
                                             double tau) {
    const double value = hallucination_energy_rayleigh(lambda_full,
                                                       lambda_plausible_padded,
                                                       delta_phi, tau);
    const Eigen::ArrayXd diff = (-tau * lambda_full.array()).exp() -
                                (-tau * lambda_plausible_padded.array()).exp();
    return make_sandwich(diff.minCoeff(), diff.maxCoeff(), value);
}

struct DecayCheck {
    bool ok = false;
    double max_violation = 0.0;  // largest positive forward difference
};

/// Verifies an energy curve is non-increasing along tau, up to 1e-12.
inline DecayCheck tau_decay_check(const std::vector<std::pair<double, double>>& curve) {
    require(curve.size() >= 3, "tau_decay_check: need at least 3 samples");
    for (std::size_t k = 0; k + 1 < curve.size(); ++k)
        require(curve[k].first < curve[k + 1].first,
                "tau_decay_check: tau grid must be strictly increasing");
    DecayCheck out;
    out.ok = true;
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
        const double diff = curve[k + 1].second - curve[k].second;
        if (diff > out.max_violation) out.max_violation = diff;
        if (diff > 1e-12) out.ok = false;
    }
    return out;
}

struct AsymptoticReport {
    double distortion_low = 0.0;
    double slope = 0.0;
    double expected_slope = 0.0;
    bool low_pass = false;
    bool slope_pass = false;
    bool pass = false;
};

/// Checks the two temperature limits of a distortion function: vanishing at
/// low temperature and logarithmic growth with coefficient mode_count / 2.
inline AsymptoticReport asymptotic_check(const std::function<double(double)>& distortion,
                                         double low_temperature,
                                         const std::vector<double>& high_grid,
                                         int mode_count) {
    require(low_temperature > 0.0 && low_temperature <= 1e-6,
            "asymptotic_check: low temperature must be in (0, 1e-6]");
    require(high_grid.size() >= 3, "asymptotic_check: high grid needs >= 3 points");
    for (std::size_t k = 0; k + 1 < high_grid.size(); ++k)
        require(high_grid[k] > 0.0 && high_grid[k] < high_grid[k + 1],
                "asymptotic_check: high grid must be positive increasing");
    require(high_grid.back() >= 1e3 * high_grid.front() * (1.0 - 1e-9),
            "asymptotic_check: high grid must span at least 3 decades");
    require(mode_count > 0, "asymptotic_check: mode count must be positive");

    AsymptoticReport out;
    out.distortion_low = distortion(low_temperature);
    std::vector<std::pair<double, double>> samples;
    for (double t : high_grid) samples.emplace_back(t, distortion(t));
    out.slope = high_temperature_slope(samples);
    out.expected_slope = 0.5 * static_cast<double>(mode_count);
    out.low_pass = out.distortion_low < 1e-8;
    out.slope_pass = std::abs(out.slope - out.expected_slope) <= 0.02 * out.expected_slope;
    out.pass = out.low_pass && out.slope_pass;
    return out;
}

} // namespace semspec
