// Hand-built bimodal graph with a tight plausible cluster and a far-off
// implausible one; prints the spectrum, the hallucinated modes, and both
// hallucination-energy forms for one (output, prompt) pair.

#include <cstdio>
#include <set>

#include "semspec/bounds.hpp"
#include "semspec/energy.hpp"
#include "semspec/graph.hpp"
#include "semspec/spectral.hpp"

using namespace semspec;

namespace {

Node make_node(int id, Modality m, double x, double y) {
    Node n;
    n.id = id;
    n.modality = m;
    n.embedding = Eigen::VectorXd(2);
    n.embedding << x, y;
    return n;
}

} // namespace

int main() {
    // nodes 0-3: plausible cluster near the origin; 4-5: distant outliers
    std::vector<Node> nodes;
    nodes.push_back(make_node(0, Modality::Text, 0.0, 0.0));
    nodes.push_back(make_node(1, Modality::Text, 0.4, 0.1));
    nodes.push_back(make_node(2, Modality::Vision, 0.1, 0.5));
    nodes.push_back(make_node(3, Modality::Vision, 0.5, 0.4));
    nodes.push_back(make_node(4, Modality::Text, 9.0, 9.0));
    nodes.push_back(make_node(5, Modality::Vision, 9.5, 9.2));

    std::vector<Hyperedge> edges;
    auto link = [&](int a, int b) {
        Hyperedge e;
        e.members = {a, b};
        edges.push_back(e);
    };
    link(0, 1);
    link(2, 3);
    link(4, 5);  // cross-modal edge inside the outlier cluster
    link(0, 2);
    link(1, 3);
    link(1, 4);  // weak bridge between the clusters

    const SemanticGraph g = build_graph(std::move(nodes), std::move(edges), 1.0);

    CouplingWeights coupling;
    coupling.alpha = {1.0, 1.0, 1.0};
    coupling.beta_pairs = {0.5, 0.5, 0.5};
    coupling.gamma = 0.25;

    const MultimodalLaplacian mm = compose_multimodal_laplacian(g, coupling);
    const Spectrum spec = eigendecompose(mm.composed);
    std::printf("composed spectrum:");
    for (int i = 0; i < 6; ++i) std::printf(" %.4f", spec.eigenvalues[i]);
    std::printf("\n");

    const std::set<int> plausible{0, 1, 2, 3};
    const std::set<int> modes = assign_modes_to_hallucination_region(spec, plausible);
    std::printf("hallucinated modes:");
    for (int i : modes) std::printf(" %d", i);
    std::printf("\n");

    const double tau = 1.0;
    const Eigen::VectorXd w = aggregated_weights(g, coupling);
    const int x = 4, p = 0;  // implausible output against a plausible prompt
    std::printf("mode-sum energy      = %.6f\n",
                hallucination_energy_modes(spec, modes, w, tau, x, p));

    const Eigen::VectorXd lam_k = pad_spectrum(
        eigendecompose(
            compose_multimodal_laplacian(induced_subgraph(g, plausible).graph, coupling)
                .composed)
            .eigenvalues,
        g.node_count());
    const ModeCoefficients delta = mode_coefficients(spec, x, p);
    const SandwichBound sb = sandwich_for_difference(spec.eigenvalues, lam_k, delta, tau);
    std::printf("difference-form energy = %.6f in [%.6f, %.6f]  %s\n", sb.value,
                sb.lower, sb.upper, sb.satisfied ? "(bounded)" : "(VIOLATION)");
    return 0;
}
