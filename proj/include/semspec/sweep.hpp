#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semspec/bounds.hpp"
#include "semspec/common.hpp"
#include "semspec/energy.hpp"
#include "semspec/graph.hpp"
#include "semspec/probability.hpp"
#include "semspec/rng.hpp"
#include "semspec/spectral.hpp"

namespace semspec {

// ---------------------------------------------------------------------------
// Schedule and configuration
// ---------------------------------------------------------------------------

/// Reciprocal annealing schedule T(t) = T0 / (1 + gamma t) over a fixed
/// strictly increasing time grid.
struct Schedule {
    double T0 = 5.0;
    double gamma = 0.05;
    std::vector<double> t_grid;

    void validate() const {
        require(T0 > 0.0, "schedule: T0 must be > 0");
        require(gamma >= 0.0, "schedule: gamma must be >= 0");
        require(!t_grid.empty(), "schedule: empty time grid");
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            require(t_grid[k] > 0.0, "schedule: grid times must be > 0");
            require(k == 0 || t_grid[k] > t_grid[k - 1],
                    "schedule: time grid must be strictly increasing");
        }
    }

    static std::vector<double> linear_grid(double t_min, double t_max, int count) {
        require(count >= 1 && t_min > 0.0 && (count == 1 || t_max > t_min),
                "schedule: bad linear grid parameters");
        std::vector<double> g;
        for (int k = 0; k < count; ++k)
            g.push_back(count == 1 ? t_min
                                   : t_min + (t_max - t_min) * k /
                                         static_cast<double>(count - 1));
        return g;
    }
};

inline double temperature_at(const Schedule& s, double t) {
    require(t >= 0.0, "temperature_at: t must be >= 0");
    const double denom = 1.0 + s.gamma * t;
    require(denom > 0.0, "temperature_at: schedule denominator must be positive");
    return s.T0 / denom;
}

struct SweepConfig {
    double tau = 1.0;
    CouplingWeights coupling = [] {
        CouplingWeights w;
        w.alpha = {1.0, 1.0, 1.0};
        w.beta_pairs = {0.5, 0.5, 0.5};
        w.gamma = 0.25;
        return w;
    }();
    double band_half_width = 1.0;   // uniform plausibility band default
    Eigen::VectorXd band_c;         // optional per-mode override; empty = uniform
    double plausible_fraction = 0.8;  // 1.0 selects the full-space limit
    int pair_count = 1000;
    std::uint64_t seed = 7;
    Metric metric = Metric::Euclidean;
    LaplacianForm laplacian_form = LaplacianForm::Zhou;
    double mode_threshold = 0.5;

    // synthetic-generator knobs
    int node_count = 300;
    int embedding_dim = 32;
    double cluster_separation = 6.0;
    double cluster_sigma = 1.0;
    int k_intra = 4;
    int k_cross = 2;
    int joint_edge_count = 0;  // 0 = one per five nodes

    int effective_joint_edges() const {
        return joint_edge_count > 0 ? joint_edge_count : std::max(1, node_count / 5);
    }

    void validate() const {
        require(tau >= 0.0, "config: tau must be >= 0");
        coupling.validate();
        require(band_half_width > 0.0, "config: band half-width must be > 0");
        require(plausible_fraction > 0.0 && plausible_fraction <= 1.0,
                "config: plausible_fraction must be in (0, 1]");
        require(pair_count > 0, "config: pair_count must be > 0");
        require(mode_threshold > 0.0 && mode_threshold <= 1.0,
                "config: mode_threshold must be in (0, 1]");
        require(node_count >= 3, "config: node_count must be >= 3");
        require(embedding_dim >= 1, "config: embedding_dim must be >= 1");
        require(cluster_sigma > 0.0, "config: cluster_sigma must be > 0");
        require(k_intra >= 1 && k_cross >= 1, "config: neighbor counts must be >= 1");
    }

    PlausibilityBand band_for(int n) const {
        if (band_c.size() > 0) {
            require(static_cast<int>(band_c.size()) == n,
                    "config: per-mode band length does not match the graph");
            PlausibilityBand b;
            b.c = band_c;
            return b;
        }
        return PlausibilityBand::uniform(n, band_half_width);
    }
};

// ---------------------------------------------------------------------------
// Synthetic data generation
// ---------------------------------------------------------------------------

struct SyntheticData {
    SemanticGraph graph;
    std::set<int> plausible;
    std::vector<std::pair<int, int>> pairs;  // (output x, prompt p), x != p
};

/// Deterministic synthetic fixture: one Gaussian cluster per modality,
/// nearest-neighbor 2-edges within and across modalities, random 3-edges
/// spanning all modalities, plausible set = nodes nearest the centroid.
inline SyntheticData generate_synthetic(const SweepConfig& config) {
    config.validate();
    const int n = config.node_count;
    const int dim = config.embedding_dim;
    require(dim >= 3, "config: embedding_dim must be >= 3 (one cluster axis per modality)");
    Rng rng(config.seed);

    std::vector<Node> nodes;
    std::array<std::vector<int>, 3> by_modality;
    for (int i = 0; i < n; ++i) {
        Node nd;
        nd.id = i;
        nd.modality = kAllModalities[static_cast<std::size_t>(i % 3)];
        nd.embedding = Eigen::VectorXd(dim);
        for (int d = 0; d < dim; ++d) nd.embedding[d] = config.cluster_sigma * rng.standard_normal();
        nd.embedding[i % 3] += config.cluster_separation;
        by_modality[static_cast<std::size_t>(i % 3)].push_back(i);
        nodes.push_back(std::move(nd));
    }
    for (const auto& group : by_modality) {
        require(static_cast<int>(group.size()) > config.k_intra,
                "config: not enough nodes per modality for k_intra neighbors");
        require(static_cast<int>(group.size()) >= config.k_cross,
                "config: not enough nodes per modality for k_cross neighbors");
    }

    // k nearest targets of `from` among `candidates` (excluding itself),
    // ties broken by id for determinism
    auto nearest = [&](int from, const std::vector<int>& candidates, int k) {
        std::vector<std::pair<double, int>> order;
        for (int c : candidates) {
            if (c == from) continue;
            order.emplace_back((nodes[static_cast<std::size_t>(from)].embedding -
                                nodes[static_cast<std::size_t>(c)].embedding)
                                   .norm(),
                               c);
        }
        std::sort(order.begin(), order.end());
        std::vector<int> out;
        for (int j = 0; j < k && j < static_cast<int>(order.size()); ++j)
            out.push_back(order[static_cast<std::size_t>(j)].second);
        return out;
    };

    std::vector<Hyperedge> edges;
    auto add_pair = [&](int a, int b) {
        Hyperedge e;
        e.members = {std::min(a, b), std::max(a, b)};
        edges.push_back(std::move(e));
    };
    for (int i = 0; i < n; ++i) {
        const auto m = static_cast<std::size_t>(i % 3);
        for (int j : nearest(i, by_modality[m], config.k_intra)) add_pair(i, j);
        for (std::size_t other = 0; other < 3; ++other) {
            if (other == m || by_modality[other].empty()) continue;
            for (int j : nearest(i, by_modality[other], config.k_cross)) add_pair(i, j);
        }
    }
    for (int k = 0; k < config.effective_joint_edges(); ++k) {
        Hyperedge e;
        for (std::size_t m = 0; m < 3; ++m)
            e.members.push_back(by_modality[m][rng.uniform_index(
                static_cast<std::uint64_t>(by_modality[m].size()))]);
        std::sort(e.members.begin(), e.members.end());
        edges.push_back(std::move(e));
    }

    SyntheticData out;
    out.graph = build_graph(std::move(nodes), std::move(edges), 1.0);

    // plausible set: nodes nearest the global centroid, ties by lower id
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (const Node& nd : out.graph.nodes) centroid += nd.embedding;
    centroid /= static_cast<double>(n);
    std::vector<std::pair<double, int>> by_dist;
    for (const Node& nd : out.graph.nodes)
        by_dist.emplace_back((nd.embedding - centroid).norm(), nd.id);
    std::sort(by_dist.begin(), by_dist.end());
    const int keep = static_cast<int>(
        std::ceil(config.plausible_fraction * static_cast<double>(n)));
    for (int j = 0; j < keep && j < n; ++j)
        out.plausible.insert(by_dist[static_cast<std::size_t>(j)].second);

    std::vector<int> plausible_vec(out.plausible.begin(), out.plausible.end());
    for (int k = 0; k < config.pair_count; ++k) {
        int x = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        int p = plausible_vec[rng.uniform_index(
            static_cast<std::uint64_t>(plausible_vec.size()))];
        while (p == x) {
            x = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            p = plausible_vec[rng.uniform_index(
                static_cast<std::uint64_t>(plausible_vec.size()))];
        }
        out.pairs.emplace_back(x, p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

struct SweepRow {
    double t = 0.0;
    double temperature = 0.0;
    int pair_id = 0;
    double e_hall_modes = 0.0;
    double e_hall_rayleigh = 0.0;
    double d_sem_closed = 0.0;
    double d_sem_discrete = 0.0;
    double bound_lower = 0.0;
    double bound_upper = 0.0;
    bool sandwich_ok = false;
    bool decay_ok = false;
};

struct SweepSummary {
    double lambda_min = 0.0;  // over every composed operator in the sweep
    double lambda_max = 0.0;
    int sandwich_violations = 0;
    int decay_violations = 0;
    int excluded_modes = 0;  // zero-weight modes dropped from partitions
    int hallucinated_mode_count = 0;  // at the final schedule step
};

struct SweepReport {
    std::vector<SweepRow> rows;  // ordered by (t, pair id)
    SweepSummary summary;
};

/// Replaces every temperature in the graph with the schedule value; stored
/// node temperatures act as multipliers on it.
inline SemanticGraph apply_schedule_temperature(const SemanticGraph& base,
                                                double temperature) {
    require(temperature > 0.0, "apply_schedule_temperature: temperature must be > 0");
    SemanticGraph g = base;
    g.global_temperature = temperature;
    for (Node& nd : g.nodes)
        if (nd.temperature) nd.temperature = *nd.temperature * temperature;
    return g;
}

// Tau ladder used for the per-row decay verdict: strictly increasing
// multiples of the configured tau (of 1.0 when tau is 0).
inline std::vector<double> decay_tau_ladder(double tau) {
    const double base = tau > 0.0 ? tau : 1.0;
    std::vector<double> out;
    for (int k = 1; k <= 8; ++k) out.push_back(0.25 * base * static_cast<double>(k));
    return out;
}

/// Full pipeline over the schedule: per step rebuild weights, Laplacians and
/// spectra, then evaluate both hallucination-energy forms, both distortion
/// forms, sandwich bounds and decay verdicts for every (output, prompt) pair.
inline SweepReport run_sweep(const SemanticGraph& base_graph,
                             const std::set<int>& plausible,
                             const std::vector<std::pair<int, int>>& pairs,
                             const Schedule& schedule, const SweepConfig& config) {
    config.validate();
    schedule.validate();
    const int n = base_graph.node_count();
    require(!plausible.empty(), "run_sweep: empty plausible set");
    for (int v : plausible)
        require(v >= 0 && v < n, "run_sweep: unknown plausible node " + std::to_string(v));
    require(!pairs.empty(), "run_sweep: empty pair list");
    for (const auto& [x, p] : pairs) {
        require(x >= 0 && x < n && p >= 0 && p < n, "run_sweep: pair id out of range");
        require(x != p, "run_sweep: output and prompt must differ");
        require(plausible.count(p) == 1,
                "run_sweep: prompt " + std::to_string(p) + " is not plausible");
    }
    const bool full_space = static_cast<int>(plausible.size()) == n;

    std::vector<bool> plausible_mask(static_cast<std::size_t>(n), false);
    for (int v : plausible) plausible_mask[static_cast<std::size_t>(v)] = true;

    SweepReport report;
    report.summary.lambda_min = std::numeric_limits<double>::infinity();
    report.summary.lambda_max = -std::numeric_limits<double>::infinity();
    const std::vector<double> ladder = decay_tau_ladder(config.tau);

    for (double t : schedule.t_grid) {
        const double temp = temperature_at(schedule, t);
        const SemanticGraph g = apply_schedule_temperature(base_graph, temp);
        const MultimodalLaplacian mm =
            compose_multimodal_laplacian(g, config.coupling, config.metric,
                                         config.laplacian_form);
        const Spectrum spec_full = eigendecompose(mm.composed);
        const Eigen::VectorXd w = aggregated_weights(g, config.coupling);
        report.summary.lambda_min = std::min(report.summary.lambda_min,
                                             spec_full.lambda_min());
        report.summary.lambda_max = std::max(report.summary.lambda_max,
                                             spec_full.lambda_max());

        Eigen::VectorXd lambda_plausible_padded;
        std::set<int> halluc_modes;
        if (!full_space) {
            const InducedSubgraph sub = induced_subgraph(g, plausible);
            Eigen::MatrixXd composed_k;
            try {
                composed_k = compose_multimodal_laplacian(sub.graph, config.coupling,
                                                          config.metric,
                                                          config.laplacian_form)
                                 .composed;
            } catch (const error& e) {
                throw error(std::string("run_sweep: plausible subgraph is degenerate: ") +
                            e.what());
            }
            lambda_plausible_padded = pad_spectrum(eigendecompose(composed_k).eigenvalues, n);
            halluc_modes = assign_modes_to_hallucination_region(spec_full, plausible,
                                                                config.mode_threshold);
        } else {
            lambda_plausible_padded = spec_full.eigenvalues;
        }

        const ModeMass mass = mode_mass(spec_full, w, config.tau);
        const PlausibilityBand band = config.band_for(n);
        const double d_closed =
            full_space ? 0.0 : semantic_distortion_closed(mass, band, temp);
        report.summary.excluded_modes = std::max(
            report.summary.excluded_modes,
            log_partition_gaussian(mass, temp).excluded_modes);
        report.summary.hallucinated_mode_count = static_cast<int>(halluc_modes.size());

        // per-node energy matrix: E(x, p) = M_xx - 2 M_xp + M_pp with
        // M = U diag(w e^{-tau lambda}) U^T; lets every pair reuse one GEMM
        const Eigen::MatrixXd m_energy =
            spec_full.eigenvectors * mass.eta.asDiagonal() *
            spec_full.eigenvectors.transpose();
        const Eigen::VectorXd m_diag = m_energy.diagonal();

        // damped ladder factors for the decay verdict, one row per ladder tau
        Eigen::MatrixXd ladder_eta(static_cast<Eigen::Index>(ladder.size()), n);
        for (std::size_t r = 0; r < ladder.size(); ++r)
            ladder_eta.row(static_cast<Eigen::Index>(r)) =
                ((-ladder[r] * spec_full.eigenvalues.array()).exp() * w.array())
                    .transpose();

        const Eigen::ArrayXd damp_full = (-config.tau * spec_full.eigenvalues.array()).exp();
        const Eigen::ArrayXd damp_plaus = (-config.tau * lambda_plausible_padded.array()).exp();
        const Eigen::ArrayXd diff_diag = damp_full - damp_plaus;
        const double diff_lo = diff_diag.minCoeff();
        const double diff_hi = diff_diag.maxCoeff();

        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto [x, p] = pairs[k];
            SweepRow row;
            row.t = t;
            row.temperature = temp;
            row.pair_id = static_cast<int>(k);
            row.d_sem_closed = d_closed;

            const Eigen::ArrayXd dphi2 =
                (spec_full.eigenvectors.row(x) - spec_full.eigenvectors.row(p))
                    .transpose()
                    .array()
                    .square();

            if (full_space) {
                row.e_hall_modes = 0.0;
                row.e_hall_rayleigh = 0.0;
                row.bound_lower = 0.0;
                row.bound_upper = 0.0;
                row.sandwich_ok = true;
                row.decay_ok = true;
                row.d_sem_discrete = 0.0;
            } else {
                for (int i : halluc_modes) row.e_hall_modes += mass.eta[i] * dphi2[i];
                const double nrm = dphi2.sum();
                row.e_hall_rayleigh = (diff_diag * dphi2).sum() / nrm;
                row.bound_lower = diff_lo;
                row.bound_upper = diff_hi;
                row.sandwich_ok = diff_lo - kBoundTolerance <= row.e_hall_rayleigh &&
                                  row.e_hall_rayleigh <= diff_hi + kBoundTolerance;

                std::vector<std::pair<double, double>> curve;
                for (std::size_t r = 0; r < ladder.size(); ++r) {
                    double e = 0.0;
                    for (int i : halluc_modes)
                        e += ladder_eta(static_cast<Eigen::Index>(r), i) * dphi2[i];
                    curve.emplace_back(ladder[r], e);
                }
                row.decay_ok = tau_decay_check(curve).ok;

                const Eigen::VectorXd energies =
                    m_diag.array() - 2.0 * m_energy.col(p).array() + m_diag[p];
                row.d_sem_discrete = log_partition_sum(energies, temp) -
                                     log_partition_sum(energies, temp, &plausible_mask);
            }
            if (!row.sandwich_ok) ++report.summary.sandwich_violations;
            if (!row.decay_ok) ++report.summary.decay_violations;
            report.rows.push_back(row);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Small statistics helpers for reports
// ---------------------------------------------------------------------------

/// Average ranks, ties sharing the mean rank.
inline std::vector<double> fractional_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

inline double spearman_rank_correlation(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    require(a.size() == b.size() && a.size() >= 2,
            "spearman_rank_correlation: need two equal-length series");
    const std::vector<double> ra = fractional_ranks(a), rb = fractional_ranks(b);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(ra.size());
    mb /= static_cast<double>(rb.size());
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
        sab += (ra[i] - ma) * (rb[i] - mb);
    }
    require(saa > 0.0 && sbb > 0.0, "spearman_rank_correlation: constant series");
    return sab / std::sqrt(saa * sbb);
}

/// Mean of one row quantity grouped by schedule step, with the step's
/// temperature, ordered by t.
inline std::vector<std::pair<double, double>> mean_by_step(
    const SweepReport& report, double SweepRow::*field, bool key_by_temperature) {
    std::vector<std::pair<double, double>> out;
    std::size_t i = 0;
    while (i < report.rows.size()) {
        std::size_t j = i;
        double acc = 0.0;
        while (j < report.rows.size() && report.rows[j].t == report.rows[i].t) {
            acc += report.rows[j].*field;
            ++j;
        }
        out.emplace_back(key_by_temperature ? report.rows[i].temperature
                                            : report.rows[i].t,
                         acc / static_cast<double>(j - i));
        i = j;
    }
    return out;
}

} // namespace semspec
