#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "semspec/graph.hpp"
#include "semspec/rng.hpp"

using namespace semspec;

namespace {

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

Node node(int id, Modality m, Eigen::VectorXd emb,
          std::optional<double> temp = std::nullopt) {
    Node n;
    n.id = id;
    n.modality = m;
    n.embedding = std::move(emb);
    n.temperature = temp;
    return n;
}

Hyperedge edge(std::vector<int> members,
               std::optional<InteractionClass> cls = std::nullopt) {
    Hyperedge e;
    e.members = std::move(members);
    e.cls = cls;
    return e;
}

// Oracle: assemble the class Laplacian from the explicit incidence-matrix
// products instead of the edge-local accumulation used by the library.
Eigen::MatrixXd laplacian_oracle(const SemanticGraph& g, const InteractionClass& cls,
                                 Metric metric, LaplacianForm form) {
    const int n = g.node_count();
    std::vector<const Hyperedge*> edges;
    for (const Hyperedge& e : g.edges)
        if (e.cls && *e.cls == cls) edges.push_back(&e);
    const int m = static_cast<int>(edges.size());
    REQUIRE(m > 0);

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, m);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd De = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        for (int id : edges[static_cast<std::size_t>(k)]->members) H(id, k) = 1.0;
        W(k, k) = hyperedge_weight(g, *edges[static_cast<std::size_t>(k)], metric);
        De(k, k) = static_cast<double>(edges[static_cast<std::size_t>(k)]->members.size());
    }
    Eigen::VectorXd deg = H * W.diagonal();
    Eigen::MatrixXd Dv_inv_sqrt = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd support = Eigen::MatrixXd::Zero(n, n);
    for (int v = 0; v < n; ++v) {
        if (deg[v] > 0.0) {
            Dv_inv_sqrt(v, v) = 1.0 / std::sqrt(deg[v]);
            support(v, v) = 1.0;
        }
    }
    Eigen::MatrixXd inner = form == LaplacianForm::Zhou
                                ? Eigen::MatrixXd(H * W * De.inverse() * H.transpose())
                                : Eigen::MatrixXd(H * W * H.transpose());
    return support - Dv_inv_sqrt * inner * Dv_inv_sqrt;
}

// Deterministic random multimodal graph used across the structural tests.
SemanticGraph random_graph(Rng& rng, int n, int dim, int n_edges) {
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd emb(dim);
        for (int d = 0; d < dim; ++d) emb[d] = rng.standard_normal();
        const Modality m = kAllModalities[rng.uniform_index(3)];
        std::optional<double> temp;
        if (rng.uniform01() < 0.3) temp = rng.uniform_in(0.2, 3.0);
        nodes.push_back(node(i, m, emb, temp));
    }
    std::vector<Hyperedge> edges;
    for (int k = 0; k < n_edges; ++k) {
        const std::size_t card = rng.uniform01() < 0.5 ? 2 : 3;
        std::set<int> members;
        while (members.size() < card)
            members.insert(static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n))));
        edges.push_back(edge({members.begin(), members.end()}));
    }
    return build_graph(std::move(nodes), std::move(edges), rng.uniform_in(0.5, 2.0));
}

} // namespace

TEST_CASE("pairwise_distance") {
    const auto a = vec2(0, 0), b = vec2(3, 4);
    CHECK(pairwise_distance(a, b) == Catch::Approx(5.0));
    CHECK(pairwise_distance(b, b) == 0.0);

    const auto ex = vec2(1, 0), ey = vec2(0, 1), diag = vec2(1, 1);
    CHECK(pairwise_distance(ex, ey, Metric::Cosine) == Catch::Approx(1.0));
    CHECK(pairwise_distance(ex, vec2(2, 0), Metric::Cosine) == 0.0);
    CHECK(pairwise_distance(ex, vec2(-1, 0), Metric::Cosine) == Catch::Approx(2.0));
    CHECK(pairwise_distance(ex, diag, Metric::Cosine) ==
          Catch::Approx(0.29289321881345254).epsilon(1e-14));
    CHECK_THROWS_AS(pairwise_distance(ex, vec2(0, 0), Metric::Cosine), error);
    Eigen::VectorXd wrong(3);
    wrong << 1, 2, 3;
    CHECK_THROWS_AS(pairwise_distance(ex, wrong), error);
}

TEST_CASE("hyperedge weight closed form") {
    // pair at distance 5, both nodes at the global temperature 2.5
    auto g = build_graph({node(0, Modality::Text, vec2(0, 0)),
                          node(1, Modality::Text, vec2(3, 4))},
                         {edge({0, 1})}, 2.5);
    CHECK(hyperedge_weight(g, g.edges[0]) ==
          Catch::Approx(0.36787944117144233).epsilon(1e-15));

    // triple: distances 5 + 5 + 8, node temperatures 1 + 2 + 3
    auto g3 = build_graph({node(0, Modality::Text, vec2(0, 0), 1.0),
                           node(1, Modality::Vision, vec2(3, 4), 2.0),
                           node(2, Modality::Audio, vec2(0, 8), 3.0)},
                          {edge({0, 1, 2})}, 1.0);
    CHECK(hyperedge_weight(g3, g3.edges[0]) ==
          Catch::Approx(0.049787068367863944).epsilon(1e-15));

    // coincident members give weight exactly 1
    auto gsame = build_graph({node(0, Modality::Text, vec2(1, 1)),
                              node(1, Modality::Text, vec2(1, 1))},
                             {edge({0, 1})}, 1.0);
    CHECK(hyperedge_weight(gsame, gsame.edges[0]) == 1.0);
}

TEST_CASE("hyperedge weight is in (0,1] and increases with temperature") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        auto g = random_graph(rng, 12, 3, 10);
        for (const auto& e : g.edges) {
            const double w = hyperedge_weight(g, e);
            CHECK(w > 0.0);
            CHECK(w <= 1.0);
        }
        SemanticGraph hot = g;
        hot.global_temperature *= 3.0;
        for (auto& nd : hot.nodes)
            if (nd.temperature) *nd.temperature *= 3.0;
        for (std::size_t k = 0; k < g.edges.size(); ++k)
            CHECK(hyperedge_weight(hot, hot.edges[k]) >=
                  hyperedge_weight(g, g.edges[k]));
    }
}

TEST_CASE("build_graph validation and dedup") {
    auto nodes_ok = [] {
        return std::vector<Node>{node(0, Modality::Text, vec2(0, 0)),
                                 node(1, Modality::Vision, vec2(1, 0)),
                                 node(2, Modality::Audio, vec2(0, 1))};
    };
    CHECK_THROWS_AS(build_graph({}, {}, 1.0), error);
    CHECK_THROWS_AS(build_graph(nodes_ok(), {}, 0.0), error);
    CHECK_THROWS_AS(build_graph(nodes_ok(), {edge({0})}, 1.0), error);
    CHECK_THROWS_AS(build_graph(nodes_ok(), {edge({0, 1, 2, 2})}, 1.0), error);
    CHECK_THROWS_AS(build_graph(nodes_ok(), {edge({0, 0})}, 1.0), error);
    CHECK_THROWS_AS(build_graph(nodes_ok(), {edge({0, 7})}, 1.0), error);
    CHECK_THROWS_AS(build_graph(nodes_ok(), {edge({0, -1})}, 1.0), error);
    {
        auto ns = nodes_ok();
        ns[1].id = 5;  // ids must stay dense
        CHECK_THROWS_AS(build_graph(ns, {}, 1.0), error);
    }
    {
        auto ns = nodes_ok();
        ns[2].embedding = Eigen::VectorXd::Zero(5);
        CHECK_THROWS_AS(build_graph(ns, {}, 1.0), error);
    }
    {
        auto ns = nodes_ok();
        ns[0].temperature = -1.0;
        CHECK_THROWS_AS(build_graph(ns, {}, 1.0), error);
    }

    // duplicates (same members, same class) collapse; member order is free
    auto g = build_graph(nodes_ok(), {edge({1, 0}), edge({0, 1}), edge({0, 1, 2})}, 1.0);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].members == std::vector<int>{0, 1});
    CHECK(*g.edges[0].cls == InteractionClass::cross(Modality::Text, Modality::Vision));
    CHECK(*g.edges[1].cls == InteractionClass::joint());
}

TEST_CASE("interaction class derivation and consistency") {
    std::vector<Node> ns = {node(0, Modality::Text, vec2(0, 0)),
                            node(1, Modality::Text, vec2(1, 0)),
                            node(2, Modality::Vision, vec2(0, 1)),
                            node(3, Modality::Audio, vec2(1, 1)),
                            node(4, Modality::Text, vec2(2, 0))};
    auto g = build_graph(ns,
                         {edge({0, 1}), edge({0, 2}), edge({0, 1, 4}),
                          edge({0, 2, 3}), edge({1, 2, 3})},
                         1.0);
    CHECK(*g.edges[0].cls == InteractionClass::intra(Modality::Text));
    CHECK(*g.edges[1].cls == InteractionClass::cross(Modality::Text, Modality::Vision));
    CHECK(*g.edges[2].cls == InteractionClass::intra(Modality::Text));
    CHECK(*g.edges[3].cls == InteractionClass::joint());
    CHECK(*g.edges[4].cls == InteractionClass::joint());

    // a two-modality triple may be explicitly tagged joint
    auto g2 = build_graph(ns, {edge({0, 1, 2}, InteractionClass::joint())}, 1.0);
    CHECK(g2.edges[0].cls->kind == InteractionKind::Joint);
    // ...but an intra tag on mixed modalities is rejected
    CHECK_THROWS_AS(
        build_graph(ns, {edge({0, 2}, InteractionClass::intra(Modality::Text))}, 1.0),
        error);
    CHECK_THROWS_AS(
        build_graph(ns, {edge({0, 1}, InteractionClass::cross(Modality::Text,
                                                              Modality::Vision))},
                    1.0),
        error);
    CHECK_THROWS_AS(build_graph(ns, {edge({0, 2}, InteractionClass::joint())}, 1.0),
                    error);
}

TEST_CASE("two-node Laplacian, both normalization forms") {
    auto g = build_graph({node(0, Modality::Text, vec2(0, 0)),
                          node(1, Modality::Text, vec2(3, 4))},
                         {edge({0, 1})}, 2.5);
    const auto cls = InteractionClass::intra(Modality::Text);

    Eigen::MatrixXd zhou = hypergraph_laplacian(g, cls);
    CHECK(zhou(0, 0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(zhou(0, 1) == Catch::Approx(-0.5).margin(1e-15));
    CHECK(zhou(1, 0) == Catch::Approx(-0.5).margin(1e-15));
    CHECK(zhou(1, 1) == Catch::Approx(0.5).margin(1e-15));

    // without the edge-cardinality factor the operator loses definiteness:
    // here it is exactly [[0,-1],[-1,0]], with eigenvalue -1
    Eigen::MatrixXd un = hypergraph_laplacian(g, cls, Metric::Euclidean,
                                              LaplacianForm::Unnormalized);
    CHECK(un(0, 0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(un(0, 1) == Catch::Approx(-1.0).margin(1e-15));
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
    CHECK(double(ones.transpose() * un * ones) < -1.0);  // indefinite witness
}

TEST_CASE("Laplacian matches incidence-matrix oracle") {
    Rng rng(202);
    for (int rep = 0; rep < 40; ++rep) {
        auto g = random_graph(rng, 15, 4, 14);
        const Metric metric = rep % 3 == 0 ? Metric::Cosine : Metric::Euclidean;
        for (const InteractionClass& cls : all_interaction_classes()) {
            bool present = false;
            for (const auto& e : g.edges)
                if (*e.cls == cls) { present = true; break; }
            if (!present) continue;
            for (LaplacianForm form : {LaplacianForm::Zhou, LaplacianForm::Unnormalized}) {
                Eigen::MatrixXd lib = hypergraph_laplacian(g, cls, metric, form);
                Eigen::MatrixXd ora = laplacian_oracle(g, cls, metric, form);
                CHECK((lib - ora).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("Laplacian structural invariants (Zhou form)") {
    Rng rng(303);
    for (int rep = 0; rep < 40; ++rep) {
        auto g = random_graph(rng, 20, 3, 16);
        auto mm = compose_multimodal_laplacian(g, CouplingWeights{});
        for (const auto& [cls, lap] : mm.blocks) {
            CHECK((lap - lap.transpose()).cwiseAbs().maxCoeff() < 1e-13);

            // zero-degree nodes: all-zero row and column
            Eigen::VectorXd degree = Eigen::VectorXd::Zero(g.node_count());
            for (const auto& e : g.edges)
                if (*e.cls == cls) {
                    const double w = hyperedge_weight(g, e);
                    for (int id : e.members) degree[id] += w;
                }
            for (int v = 0; v < g.node_count(); ++v)
                if (degree[v] == 0.0) {
                    CHECK(lap.row(v).cwiseAbs().maxCoeff() == 0.0);
                    CHECK(lap.col(v).cwiseAbs().maxCoeff() == 0.0);
                }

            // the scaled constant vector on the support is in the kernel
            Eigen::VectorXd z(g.node_count());
            for (int v = 0; v < g.node_count(); ++v)
                z[v] = degree[v] > 0.0 ? std::sqrt(degree[v]) : 0.0;
            CHECK((lap * z).cwiseAbs().maxCoeff() < 1e-12);

            // nonnegative quadratic form on random probes
            for (int probe = 0; probe < 5; ++probe) {
                Eigen::VectorXd x(g.node_count());
                for (int v = 0; v < g.node_count(); ++v) x[v] = rng.standard_normal();
                CHECK(double(x.transpose() * lap * x) > -1e-12);
            }
        }
    }
}

TEST_CASE("composition is the coefficient-weighted block sum") {
    Rng rng(404);
    auto g = random_graph(rng, 18, 3, 20);
    CouplingWeights w;
    w.alpha = {0.7, 0.3, 1.1};
    w.beta_pairs = {0.5, 0.2, 0.9};
    w.gamma = 0.25;
    auto mm = compose_multimodal_laplacian(g, w);

    Eigen::MatrixXd manual = Eigen::MatrixXd::Zero(g.node_count(), g.node_count());
    for (const auto& [cls, lap] : mm.blocks)
        manual += w.coefficient_of(cls) * lap;
    CHECK((mm.composed - manual).cwiseAbs().maxCoeff() == 0.0);

    // absent classes must not appear in the block map
    for (const auto& [cls, lap] : mm.blocks) {
        bool present = false;
        for (const auto& e : g.edges)
            if (*e.cls == cls) { present = true; break; }
        CHECK(present);
    }

    CouplingWeights bad = w;
    bad.gamma = -0.1;
    CHECK_THROWS_AS(compose_multimodal_laplacian(g, bad), error);
}

TEST_CASE("aggregated per-node weights") {
    CouplingWeights w;
    w.alpha = {0.7, 0.3, 1.1};
    w.beta_pairs = {0.5, 0.2, 0.9};  // TV, TA, VA
    w.gamma = 0.25;

    // unimodal graph: alpha only
    auto uni = build_graph({node(0, Modality::Vision, vec2(0, 0)),
                            node(1, Modality::Vision, vec2(1, 0))},
                           {edge({0, 1})}, 1.0);
    Eigen::VectorXd wu = aggregated_weights(uni, w);
    CHECK(wu[0] == 0.3);
    CHECK(wu[1] == 0.3);

    // all three modalities plus a joint edge: alpha + both betas + gamma
    auto tri = build_graph({node(0, Modality::Text, vec2(0, 0)),
                            node(1, Modality::Vision, vec2(1, 0)),
                            node(2, Modality::Audio, vec2(0, 1))},
                           {edge({0, 1, 2})}, 1.0);
    Eigen::VectorXd wt = aggregated_weights(tri, w);
    CHECK(wt[0] == Catch::Approx(0.7 + 0.5 + 0.2 + 0.25));
    CHECK(wt[1] == Catch::Approx(0.3 + 0.5 + 0.9 + 0.25));
    CHECK(wt[2] == Catch::Approx(1.1 + 0.2 + 0.9 + 0.25));

    // two modalities, no joint edge: alpha + the one applicable beta
    auto duo = build_graph({node(0, Modality::Text, vec2(0, 0)),
                            node(1, Modality::Audio, vec2(1, 0))},
                           {edge({0, 1})}, 1.0);
    Eigen::VectorXd wd = aggregated_weights(duo, w);
    CHECK(wd[0] == Catch::Approx(0.7 + 0.2));
    CHECK(wd[1] == Catch::Approx(1.1 + 0.2));
}

TEST_CASE("induced subgraph") {
    Rng rng(505);
    auto g = random_graph(rng, 16, 3, 18);
    std::set<int> keep = {1, 3, 4, 7, 8, 11, 15};
    auto sub = induced_subgraph(g, keep);

    REQUIRE(sub.graph.node_count() == static_cast<int>(keep.size()));
    for (std::size_t i = 0; i < sub.kept_old_ids.size(); ++i) {
        const int old_id = sub.kept_old_ids[i];
        CHECK(keep.count(old_id) == 1);
        CHECK(sub.new_id_of_old[static_cast<std::size_t>(old_id)] == static_cast<int>(i));
        const Node& a = sub.graph.nodes[i];
        const Node& b = g.nodes[static_cast<std::size_t>(old_id)];
        CHECK(a.modality == b.modality);
        CHECK(a.embedding == b.embedding);
        CHECK(a.temperature == b.temperature);
    }
    for (int old_id = 0; old_id < g.node_count(); ++old_id)
        if (!keep.count(old_id))
            CHECK(sub.new_id_of_old[static_cast<std::size_t>(old_id)] == -1);

    // kept edges are exactly those fully inside, with identical weights
    std::size_t expected = 0;
    for (const auto& e : g.edges) {
        bool inside = true;
        for (int id : e.members)
            if (!keep.count(id)) { inside = false; break; }
        if (!inside) continue;
        ++expected;
        std::vector<int> mapped;
        for (int id : e.members)
            mapped.push_back(sub.new_id_of_old[static_cast<std::size_t>(id)]);
        std::sort(mapped.begin(), mapped.end());
        bool found = false;
        for (const auto& se : sub.graph.edges)
            if (se.members == mapped && *se.cls == *e.cls) {
                found = true;
                CHECK(hyperedge_weight(sub.graph, se) ==
                      Catch::Approx(hyperedge_weight(g, e)).epsilon(1e-15));
            }
        CHECK(found);
    }
    CHECK(sub.graph.edges.size() == expected);

    CHECK_THROWS_AS(induced_subgraph(g, {}), error);
    CHECK_THROWS_AS(induced_subgraph(g, {0, 99}), error);
}

TEST_CASE("deterministic rng stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.uniform01() == b.uniform01());
        CHECK(a.standard_normal() == b.standard_normal());
    }
    Rng c(43);
    bool diverged = false;
    for (int i = 0; i < 10; ++i)
        if (b.uniform01() != c.uniform01()) diverged = true;
    CHECK(diverged);
}
