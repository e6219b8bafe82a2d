#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semspec/common.hpp"

namespace semspec {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class Modality : int { Text = 0, Vision = 1, Audio = 2 };

inline constexpr std::array<Modality, 3> kAllModalities = {
    Modality::Text, Modality::Vision, Modality::Audio};

inline char modality_letter(Modality m) {
    switch (m) {
        case Modality::Text: return 'T';
        case Modality::Vision: return 'V';
        case Modality::Audio: return 'A';
    }
    return '?';
}

inline Modality parse_modality(const std::string& s) {
    if (s == "T") return Modality::Text;
    if (s == "V") return Modality::Vision;
    if (s == "A") return Modality::Audio;
    throw error("unknown modality '" + s + "' (expected T, V or A)");
}

enum class InteractionKind : int { Intra = 0, Cross = 1, Joint = 2 };

/// One of seven interaction classes: intra(T|V|A), cross of an unordered
/// modality pair, or the single three-way joint class.
struct InteractionClass {
    InteractionKind kind = InteractionKind::Joint;
    Modality a = Modality::Text;  // intra: the modality; cross: smaller of pair
    Modality b = Modality::Text;  // cross: larger of pair; unused otherwise

    static InteractionClass intra(Modality m) {
        return {InteractionKind::Intra, m, m};
    }
    static InteractionClass cross(Modality x, Modality y) {
        require(x != y, "cross class needs two distinct modalities");
        if (static_cast<int>(x) > static_cast<int>(y)) std::swap(x, y);
        return {InteractionKind::Cross, x, y};
    }
    static InteractionClass joint() {
        return {InteractionKind::Joint, Modality::Text, Modality::Text};
    }

    friend bool operator==(const InteractionClass& l, const InteractionClass& r) {
        if (l.kind != r.kind) return false;
        if (l.kind == InteractionKind::Joint) return true;
        if (l.kind == InteractionKind::Intra) return l.a == r.a;
        return l.a == r.a && l.b == r.b;
    }
    friend bool operator!=(const InteractionClass& l, const InteractionClass& r) {
        return !(l == r);
    }
    friend bool operator<(const InteractionClass& l, const InteractionClass& r) {
        if (l.kind != r.kind) return l.kind < r.kind;
        if (l.kind == InteractionKind::Joint) return false;
        if (l.a != r.a) return l.a < r.a;
        if (l.kind == InteractionKind::Intra) return false;
        return l.b < r.b;
    }
};

inline std::string to_string(const InteractionClass& c) {
    switch (c.kind) {
        case InteractionKind::Intra:
            return std::string("intra(") + modality_letter(c.a) + ")";
        case InteractionKind::Cross:
            return std::string("cross(") + modality_letter(c.a) + "," +
                   modality_letter(c.b) + ")";
        case InteractionKind::Joint: return "joint";
    }
    return "?";
}

/// Canonical enumeration order used for block maps and composition.
inline std::vector<InteractionClass> all_interaction_classes() {
    std::vector<InteractionClass> out;
    for (Modality m : kAllModalities) out.push_back(InteractionClass::intra(m));
    out.push_back(InteractionClass::cross(Modality::Text, Modality::Vision));
    out.push_back(InteractionClass::cross(Modality::Text, Modality::Audio));
    out.push_back(InteractionClass::cross(Modality::Vision, Modality::Audio));
    out.push_back(InteractionClass::joint());
    return out;
}

struct Node {
    int id = 0;
    Modality modality = Modality::Text;
    Eigen::VectorXd embedding;
    std::optional<double> temperature;  // node-local, overrides the global one
};

struct Hyperedge {
    std::vector<int> members;  // sorted, distinct, 2 or 3 entries
    std::optional<InteractionClass> cls;  // derived from modalities if absent
};

struct SemanticGraph {
    std::vector<Node> nodes;
    std::vector<Hyperedge> edges;  // deduplicated, classes resolved
    double global_temperature = 1.0;

    int node_count() const { return static_cast<int>(nodes.size()); }

    double temperature_of(int node_id) const {
        return nodes[static_cast<std::size_t>(node_id)].temperature.value_or(
            global_temperature);
    }

    /// Modalities that occur among the nodes, in enum order.
    std::vector<Modality> present_modalities() const {
        std::array<bool, 3> seen = {false, false, false};
        for (const Node& n : nodes) seen[static_cast<std::size_t>(n.modality)] = true;
        std::vector<Modality> out;
        for (Modality m : kAllModalities)
            if (seen[static_cast<std::size_t>(m)]) out.push_back(m);
        return out;
    }
};

/// Nonnegative coupling coefficients for composing the multimodal operator:
/// one alpha per modality, one beta per unordered modality pair, one gamma.
struct CouplingWeights {
    std::array<double, 3> alpha = {1.0, 1.0, 1.0};       // indexed by Modality
    std::array<double, 3> beta_pairs = {1.0, 1.0, 1.0};  // TV, TA, VA
    double gamma = 1.0;

    static int pair_index(Modality x, Modality y) {
        require(x != y, "beta is defined for distinct modalities");
        const int i = static_cast<int>(x), j = static_cast<int>(y);
        const int lo = std::min(i, j), hi = std::max(i, j);
        if (lo == 0) return hi == 1 ? 0 : 1;  // TV, TA
        return 2;                             // VA
    }

    double alpha_of(Modality m) const { return alpha[static_cast<std::size_t>(m)]; }
    double beta_of(Modality x, Modality y) const {
        return beta_pairs[static_cast<std::size_t>(pair_index(x, y))];
    }

    void validate() const {
        for (double a : alpha) require(a >= 0.0, "alpha coefficients must be >= 0");
        for (double b : beta_pairs) require(b >= 0.0, "beta coefficients must be >= 0");
        require(gamma >= 0.0, "gamma must be >= 0");
    }

    double coefficient_of(const InteractionClass& c) const {
        switch (c.kind) {
            case InteractionKind::Intra: return alpha_of(c.a);
            case InteractionKind::Cross: return beta_of(c.a, c.b);
            case InteractionKind::Joint: return gamma;
        }
        return 0.0;
    }

    CouplingWeights operator+(const CouplingWeights& o) const {
        CouplingWeights r;
        for (int i = 0; i < 3; ++i) {
            r.alpha[static_cast<std::size_t>(i)] =
                alpha[static_cast<std::size_t>(i)] + o.alpha[static_cast<std::size_t>(i)];
            r.beta_pairs[static_cast<std::size_t>(i)] =
                beta_pairs[static_cast<std::size_t>(i)] +
                o.beta_pairs[static_cast<std::size_t>(i)];
        }
        r.gamma = gamma + o.gamma;
        return r;
    }
};

enum class Metric { Euclidean, Cosine };

inline Metric parse_metric(const std::string& s) {
    if (s == "euclidean") return Metric::Euclidean;
    if (s == "cosine") return Metric::Cosine;
    throw error("unknown metric '" + s + "' (expected euclidean or cosine)");
}

inline std::string to_string(Metric m) {
    return m == Metric::Euclidean ? "euclidean" : "cosine";
}

/// Laplacian normalization variant. `Zhou` is the edge-degree normalized
/// form (symmetric PSD, spectrum in [0,1]). `Unnormalized` drops the
/// edge-degree factor; it is kept for comparison runs and is indefinite in
/// general, so nothing downstream should assume PSD under it.
enum class LaplacianForm { Zhou, Unnormalized };

inline LaplacianForm parse_laplacian_form(const std::string& s) {
    if (s == "zhou") return LaplacianForm::Zhou;
    if (s == "unnormalized") return LaplacianForm::Unnormalized;
    throw error("unknown laplacian_form '" + s + "' (expected zhou or unnormalized)");
}

inline std::string to_string(LaplacianForm f) {
    return f == LaplacianForm::Zhou ? "zhou" : "unnormalized";
}

struct MultimodalLaplacian {
    std::map<InteractionClass, Eigen::MatrixXd> blocks;  // present classes only
    CouplingWeights coefficients;
    Eigen::MatrixXd composed;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline double pairwise_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                Metric metric = Metric::Euclidean) {
    require(a.size() == b.size(), "pairwise_distance: dimension mismatch (" +
                                      std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
    if (metric == Metric::Euclidean) return (a - b).norm();
    const double na = a.norm(), nb = b.norm();
    require(na > 0.0 && nb > 0.0, "pairwise_distance: cosine undefined for zero vector");
    // clamp so identical vectors give exactly 0 despite rounding
    return std::max(0.0, 1.0 - a.dot(b) / (na * nb));
}

namespace detail {

inline InteractionClass derive_class(const SemanticGraph& g,
                                     const std::vector<int>& members) {
    std::set<Modality> mods;
    for (int id : members) mods.insert(g.nodes[static_cast<std::size_t>(id)].modality);
    if (mods.size() == 1) return InteractionClass::intra(*mods.begin());
    if (members.size() == 2) {
        auto it = mods.begin();
        const Modality x = *it++;
        return InteractionClass::cross(x, *it);
    }
    // cardinality 3, mixed modalities: joint unless explicitly classed
    return InteractionClass::joint();
}

inline void check_class_consistency(const SemanticGraph& g, const Hyperedge& e) {
    std::set<Modality> mods;
    for (int id : e.members) mods.insert(g.nodes[static_cast<std::size_t>(id)].modality);
    const InteractionClass& c = *e.cls;
    switch (c.kind) {
        case InteractionKind::Intra:
            require(mods.size() == 1 && *mods.begin() == c.a,
                    "edge classed " + to_string(c) + " has mismatched member modalities");
            break;
        case InteractionKind::Cross: {
            require(mods.size() == 2, "edge classed " + to_string(c) +
                                          " must span exactly two modalities");
            auto it = mods.begin();
            const Modality x = *it++;
            require(InteractionClass::cross(x, *it) == c,
                    "edge classed " + to_string(c) + " spans different modalities");
            break;
        }
        case InteractionKind::Joint:
            require(e.members.size() == 3, "joint edges must have cardinality 3");
            break;
    }
}

} // namespace detail

/// Validates nodes and edges, deduplicates edges, and resolves the
/// interaction class of every edge (deriving it from member modalities
/// when not given).
inline SemanticGraph build_graph(std::vector<Node> nodes, std::vector<Hyperedge> edges,
                                 double global_temperature) {
    require(!nodes.empty(), "graph needs at least one node");
    require(global_temperature > 0.0, "global temperature must be > 0");

    SemanticGraph g;
    g.global_temperature = global_temperature;

    const Eigen::Index dim = nodes.front().embedding.size();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Node& n = nodes[i];
        require(n.id == static_cast<int>(i),
                "node ids must be dense 0-based integers; node " + std::to_string(i) +
                    " has id " + std::to_string(n.id));
        require(n.embedding.size() == dim,
                "embedding dimension mismatch at node " + std::to_string(n.id) + " (" +
                    std::to_string(n.embedding.size()) + " vs " + std::to_string(dim) + ")");
        if (n.temperature)
            require(*n.temperature > 0.0,
                    "node " + std::to_string(n.id) + " temperature must be > 0");
    }
    g.nodes = std::move(nodes);

    std::set<std::pair<std::vector<int>, InteractionClass>> seen;
    for (Hyperedge e : edges) {
        std::sort(e.members.begin(), e.members.end());
        require(e.members.size() == 2 || e.members.size() == 3,
                "hyperedges must have cardinality 2 or 3");
        require(std::adjacent_find(e.members.begin(), e.members.end()) == e.members.end(),
                "hyperedge members must be distinct");
        for (int id : e.members)
            require(id >= 0 && id < g.node_count(),
                    "edge references unknown node " + std::to_string(id));
        if (!e.cls) {
            e.cls = detail::derive_class(g, e.members);
        } else {
            detail::check_class_consistency(g, e);
        }
        if (seen.emplace(e.members, *e.cls).second) g.edges.push_back(std::move(e));
    }
    return g;
}

/// Temperature-modulated hyperedge weight: exp of minus the sum of pairwise
/// member distances over the sum of member temperatures. Always in (0, 1].
inline double hyperedge_weight(const SemanticGraph& g, const Hyperedge& e,
                               Metric metric = Metric::Euclidean) {
    double dist_sum = 0.0;
    for (std::size_t i = 0; i < e.members.size(); ++i)
        for (std::size_t j = i + 1; j < e.members.size(); ++j)
            dist_sum += pairwise_distance(
                g.nodes[static_cast<std::size_t>(e.members[i])].embedding,
                g.nodes[static_cast<std::size_t>(e.members[j])].embedding, metric);
    double temp_sum = 0.0;
    for (int id : e.members) temp_sum += g.temperature_of(id);
    require(temp_sum > 0.0, "hyperedge temperature sum must be > 0");
    return std::exp(-dist_sum / temp_sum);
}

/// Normalized hypergraph Laplacian restricted to one interaction class.
///
/// Zhou form: L = I - Dv^{-1/2} H W De^{-1} H^T Dv^{-1/2}, with H the 0/1
/// node-edge incidence matrix, W the diagonal of edge weights, De the
/// diagonal of edge cardinalities and Dv the diagonal of weighted degrees.
/// Nodes with zero degree in the class get an all-zero row and column
/// (diagonal 0, not 1), so they contribute a zero eigenvalue.
inline Eigen::MatrixXd hypergraph_laplacian(const SemanticGraph& g,
                                            const InteractionClass& cls,
                                            Metric metric = Metric::Euclidean,
                                            LaplacianForm form = LaplacianForm::Zhou) {
    const int n = g.node_count();
    std::vector<const Hyperedge*> edges;
    for (const Hyperedge& e : g.edges)
        if (e.cls && *e.cls == cls) edges.push_back(&e);
    require(!edges.empty(), "no edges of class " + to_string(cls));

    std::vector<double> weight(edges.size());
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        weight[k] = hyperedge_weight(g, *edges[k], metric);
        for (int id : edges[k]->members) degree[id] += weight[k];
    }
    require(degree.maxCoeff() > 0.0, "all-zero degree matrix for class " + to_string(cls));

    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (int v = 0; v < n; ++v)
        if (degree[v] > 0.0) lap(v, v) = 1.0;

    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& members = edges[k]->members;
        const double card = static_cast<double>(members.size());
        const double w = form == LaplacianForm::Zhou ? weight[k] / card : weight[k];
        for (int u : members)
            for (int v : members)
                lap(u, v) -= w / std::sqrt(degree[u] * degree[v]);
    }
    return lap;
}

/// Coefficient-weighted sum of the per-class Laplacian blocks. Classes with
/// no edges are omitted from the block map and contribute nothing.
inline MultimodalLaplacian compose_multimodal_laplacian(
    const SemanticGraph& g, const CouplingWeights& weights,
    Metric metric = Metric::Euclidean, LaplacianForm form = LaplacianForm::Zhou) {
    weights.validate();
    const int n = g.node_count();
    MultimodalLaplacian out;
    out.coefficients = weights;
    out.composed = Eigen::MatrixXd::Zero(n, n);

    for (const InteractionClass& cls : all_interaction_classes()) {
        bool present = false;
        for (const Hyperedge& e : g.edges)
            if (e.cls && *e.cls == cls) { present = true; break; }
        if (!present) continue;
        Eigen::MatrixXd block = hypergraph_laplacian(g, cls, metric, form);
        out.composed += weights.coefficient_of(cls) * block;
        out.blocks.emplace(cls, std::move(block));
    }
    require(!out.blocks.empty(), "graph has no edges in any interaction class");
    return out;
}

/// Per-node aggregated mode weight: alpha of the node's modality, plus beta
/// toward every other modality present in the graph, plus gamma when the
/// graph carries joint edges.
inline Eigen::VectorXd aggregated_weights(const SemanticGraph& g,
                                          const CouplingWeights& weights) {
    weights.validate();
    const std::vector<Modality> present = g.present_modalities();
    bool has_joint = false;
    for (const Hyperedge& e : g.edges)
        if (e.cls && e.cls->kind == InteractionKind::Joint) { has_joint = true; break; }

    Eigen::VectorXd w(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
        const Modality m = g.nodes[static_cast<std::size_t>(i)].modality;
        double wi = weights.alpha_of(m);
        for (Modality other : present)
            if (other != m) wi += weights.beta_of(m, other);
        if (has_joint) wi += weights.gamma;
        w[i] = wi;
    }
    return w;
}

struct InducedSubgraph {
    SemanticGraph graph;
    std::vector<int> kept_old_ids;   // new id -> old id, ascending
    std::vector<int> new_id_of_old;  // old id -> new id, -1 if dropped
};

/// Restriction to a node subset: keeps the nodes and every hyperedge fully
/// contained in the subset, reindexing ids densely.
inline InducedSubgraph induced_subgraph(const SemanticGraph& g,
                                        const std::set<int>& keep) {
    require(!keep.empty(), "induced_subgraph: empty keep set");
    for (int id : keep)
        require(id >= 0 && id < g.node_count(),
                "induced_subgraph: unknown node " + std::to_string(id));

    InducedSubgraph out;
    out.new_id_of_old.assign(static_cast<std::size_t>(g.node_count()), -1);
    for (int old_id : keep) {  // std::set iterates ascending
        out.new_id_of_old[static_cast<std::size_t>(old_id)] =
            static_cast<int>(out.kept_old_ids.size());
        out.kept_old_ids.push_back(old_id);
    }

    std::vector<Node> nodes;
    nodes.reserve(out.kept_old_ids.size());
    for (std::size_t i = 0; i < out.kept_old_ids.size(); ++i) {
        Node n = g.nodes[static_cast<std::size_t>(out.kept_old_ids[i])];
        n.id = static_cast<int>(i);
        nodes.push_back(std::move(n));
    }

    std::vector<Hyperedge> edges;
    for (const Hyperedge& e : g.edges) {
        bool inside = true;
        for (int id : e.members)
            if (out.new_id_of_old[static_cast<std::size_t>(id)] < 0) { inside = false; break; }
        if (!inside) continue;
        Hyperedge kept = e;
        for (int& id : kept.members) id = out.new_id_of_old[static_cast<std::size_t>(id)];
        std::sort(kept.members.begin(), kept.members.end());
        edges.push_back(std::move(kept));
    }

    out.graph = build_graph(std::move(nodes), std::move(edges), g.global_temperature);
    return out;
}

} // namespace semspec
