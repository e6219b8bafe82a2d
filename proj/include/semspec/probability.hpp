#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "semspec/common.hpp"

namespace semspec {

// Probabilities below this are exact zeros for support purposes; log-domain
// sums are always max-shifted.
inline constexpr double kSupportFloor = 1e-300;

/// Enumerated outcome universe with a plausibility mask (the valid outputs)
/// and a grounded mask (the verifiably correct subset of those).
struct OutcomeSpace {
    std::vector<bool> plausible_mask;
    std::vector<bool> grounded_mask;

    int size() const { return static_cast<int>(plausible_mask.size()); }

    void validate() const {
        require(!plausible_mask.empty(), "outcome space must be nonempty");
        require(grounded_mask.size() == plausible_mask.size(),
                "mask lengths differ");
        bool any_plausible = false;
        for (std::size_t i = 0; i < plausible_mask.size(); ++i) {
            if (plausible_mask[i]) any_plausible = true;
            require(!grounded_mask[i] || plausible_mask[i],
                    "grounded outcome " + std::to_string(i) + " is not plausible");
        }
        require(any_plausible, "no plausible outcome");
    }
};

struct DiscreteDistribution {
    Eigen::VectorXd p;

    int size() const { return static_cast<int>(p.size()); }

    void validate() const {
        require(p.size() > 0, "empty distribution");
        require(p.minCoeff() >= 0.0, "negative probability");
        require(std::abs(p.sum() - 1.0) <= 1e-12, "probabilities must sum to 1");
    }
};

/// log sum_i e^{v_i}, max-shifted.
inline double log_sum_exp(const Eigen::VectorXd& v) {
    require(v.size() > 0, "log_sum_exp: empty vector");
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;  // all -inf stays -inf
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
    return m + std::log(acc);
}

/// Log-partition log sum_i e^{-E_i/T}, optionally restricted to a mask.
inline double log_partition_sum(const Eigen::VectorXd& energies, double temperature,
                                const std::vector<bool>* mask = nullptr) {
    require(temperature > 0.0, "log_partition_sum: temperature must be > 0");
    require(energies.size() > 0, "log_partition_sum: empty energy vector");
    std::vector<double> logs;
    for (Eigen::Index i = 0; i < energies.size(); ++i) {
        if (mask && !(*mask)[static_cast<std::size_t>(i)]) continue;
        logs.push_back(-energies[i] / temperature);
    }
    require(!logs.empty(), "log_partition_sum: mask excludes every outcome");
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(logs.data(),
                                                    static_cast<Eigen::Index>(logs.size()));
    return log_sum_exp(v);
}

/// Boltzmann weights p_i = e^{-E_i/T} / Z, computed with a max shift.
inline DiscreteDistribution boltzmann_distribution(const Eigen::VectorXd& energies,
                                                   double temperature) {
    require(temperature > 0.0, "boltzmann_distribution: temperature must be > 0");
    require(energies.size() > 0, "boltzmann_distribution: empty energy vector");
    require(energies.allFinite(), "boltzmann_distribution: non-finite energy");
    const Eigen::ArrayXd shifted =
        (-(energies.array() - energies.minCoeff()) / temperature).exp();
    DiscreteDistribution d;
    d.p = (shifted / shifted.sum()).matrix();
    return d;
}

/// Conditional distribution given the mask: zero outside, renormalized inside.
inline DiscreteDistribution restrict(const DiscreteDistribution& dist,
                                     const std::vector<bool>& mask) {
    require(static_cast<int>(mask.size()) == dist.size(),
            "restrict: mask length mismatch");
    double mass = 0.0;
    for (int i = 0; i < dist.size(); ++i)
        if (mask[static_cast<std::size_t>(i)]) mass += dist.p[i];
    require(mass > kSupportFloor, "restrict: mask carries zero probability mass");
    DiscreteDistribution out;
    out.p = Eigen::VectorXd::Zero(dist.size());
    for (int i = 0; i < dist.size(); ++i)
        if (mask[static_cast<std::size_t>(i)]) out.p[i] = dist.p[i] / mass;
    return out;
}

/// KL(p || q) with the 0 log 0 = 0 convention. Requires supp(p) within
/// supp(q); entries below the support floor count as exact zeros.
inline double kl_divergence(const DiscreteDistribution& p,
                            const DiscreteDistribution& q) {
    require(p.size() == q.size(), "kl_divergence: size mismatch");
    double acc = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p.p[i] <= kSupportFloor) continue;
        require(q.p[i] > kSupportFloor,
                "kl_divergence: absolute continuity violated at outcome " +
                    std::to_string(i));
        acc += p.p[i] * std::log(p.p[i] / q.p[i]);
    }
    return acc;
}

/// Minus log-mass of the plausible set under the model distribution: the
/// discrete semantic-distortion scalar.
inline double semantic_distortion_discrete(const DiscreteDistribution& f_p,
                                           const OutcomeSpace& space) {
    space.validate();
    require(space.size() == f_p.size(), "semantic_distortion_discrete: size mismatch");
    double mass = 0.0;
    for (int i = 0; i < f_p.size(); ++i)
        if (space.plausible_mask[static_cast<std::size_t>(i)]) mass += f_p.p[i];
    require(mass > kSupportFloor, "semantic_distortion_discrete: zero plausible mass");
    return -std::log(mass);
}

struct KlDecomposition {
    double kl_full = 0.0;        // D(g || f_p)
    double kl_restricted = 0.0;  // D(g || f_p conditioned on the plausible set)
    double distortion = 0.0;     // -log P_{f_p}(plausible)
    double residual = 0.0;       // kl_full - kl_restricted - distortion
};

/// Exact decomposition D(g||f_p) = D(g||f_p^K) + distortion for any gold
/// distribution g supported on the grounded outcomes. The residual should
/// vanish to rounding.
inline KlDecomposition kl_decomposition_check(const DiscreteDistribution& g,
                                              const DiscreteDistribution& f_p,
                                              const OutcomeSpace& space) {
    space.validate();
    require(space.size() == g.size() && space.size() == f_p.size(),
            "kl_decomposition_check: size mismatch");
    for (int i = 0; i < g.size(); ++i)
        require(g.p[i] <= kSupportFloor || space.grounded_mask[static_cast<std::size_t>(i)],
                "gold distribution has mass on ungrounded outcome " + std::to_string(i));

    KlDecomposition out;
    out.kl_full = kl_divergence(g, f_p);
    out.kl_restricted = kl_divergence(g, restrict(f_p, space.plausible_mask));
    out.distortion = semantic_distortion_discrete(f_p, space);
    out.residual = out.kl_full - out.kl_restricted - out.distortion;
    return out;
}

} // namespace semspec
