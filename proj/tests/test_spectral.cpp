#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "semspec/graph.hpp"
#include "semspec/rng.hpp"
#include "semspec/spectral.hpp"

using namespace semspec;

namespace {

Eigen::MatrixXd random_symmetric(Rng& rng, int n) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.standard_normal();
    return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd random_psd(Rng& rng, int n) {
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = rng.standard_normal();
    return b.transpose() * b / static_cast<double>(n);
}

// Oracle: truncated power series for exp(A). Converges far below 1e-12 for
// the small damped operators used here.
Eigen::MatrixXd matrix_exp_series(const Eigen::MatrixXd& a, int terms = 60) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd pw = acc;
    double fact = 1.0;
    for (int k = 1; k <= terms; ++k) {
        pw = pw * a;
        fact *= static_cast<double>(k);
        acc += pw / fact;
    }
    return acc;
}

// Unweighted path graph Laplacian via the graph module: text nodes laid out
// on a line, consecutive pairs joined.
Eigen::MatrixXd path_laplacian(int n) {
    std::vector<Node> nodes;
    std::vector<Hyperedge> edges;
    for (int i = 0; i < n; ++i) {
        Node nd;
        nd.id = i;
        nd.modality = Modality::Text;
        nd.embedding = Eigen::VectorXd::Zero(1);
        nd.embedding[0] = static_cast<double>(i);
        nodes.push_back(nd);
    }
    for (int i = 0; i + 1 < n; ++i) {
        Hyperedge e;
        e.members = {i, i + 1};
        edges.push_back(e);
    }
    auto g = build_graph(std::move(nodes), std::move(edges), 2.0);
    return hypergraph_laplacian(g, InteractionClass::intra(Modality::Text));
}

} // namespace

TEST_CASE("eigendecompose basics") {
    auto id3 = eigendecompose(Eigen::MatrixXd::Identity(3, 3));
    CHECK(id3.eigenvalues.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(id3.eigenvalues[i] == Catch::Approx(1.0));

    Eigen::MatrixXd two(2, 2);
    two << 0.5, -0.5, -0.5, 0.5;
    auto s = eigendecompose(two);
    CHECK(s.eigenvalues[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(s.eigenvalues[1] == Catch::Approx(1.0).margin(1e-14));
    // sign convention: first nonzero component positive
    CHECK(s.eigenvectors(0, 0) > 0.0);
    CHECK(s.eigenvectors(0, 1) > 0.0);
    CHECK(s.eigenvectors(0, 0) == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(s.eigenvectors(1, 1) == Catch::Approx(-1.0 / std::sqrt(2.0)));

    Eigen::MatrixXd nonsym(2, 2);
    nonsym << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(eigendecompose(nonsym), error);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(eigendecompose(bad), error);
    CHECK_THROWS_AS(eigendecompose(Eigen::MatrixXd::Zero(2, 3)), error);
}

TEST_CASE("eigendecompose reconstruction, ordering, orthonormality") {
    Rng rng(19);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 8;
        Eigen::MatrixXd a = random_symmetric(rng, n);
        auto s = eigendecompose(a);
        for (int i = 0; i + 1 < n; ++i) CHECK(s.eigenvalues[i] <= s.eigenvalues[i + 1]);
        Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
        CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
        Eigen::MatrixXd rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() *
                                  s.eigenvectors.transpose();
        CHECK((rebuilt - a).cwiseAbs().maxCoeff() < 1e-10);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (std::abs(s.eigenvectors(i, j)) > 1e-12) {
                    CHECK(s.eigenvectors(i, j) > 0.0);
                    break;
                }
            }
        }
    }
}

TEST_CASE("diffusion kernel limits and series oracle") {
    Rng rng(23);
    auto s6 = eigendecompose(random_psd(rng, 6));
    CHECK((diffusion_kernel(s6, 0.0) - Eigen::MatrixXd::Identity(6, 6))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK_THROWS_AS(diffusion_kernel(s6, -0.1), error);

    // long-time limit on a PSD Laplacian with lambda_min = 0: the kernel
    // converges to the projector onto the zero eigenspace
    Eigen::MatrixXd two(2, 2);
    two << 0.5, -0.5, -0.5, 0.5;
    auto s2 = eigendecompose(two);
    Eigen::MatrixXd proj(2, 2);
    proj << 0.5, 0.5, 0.5, 0.5;
    CHECK((diffusion_kernel(s2, 60.0) - proj).cwiseAbs().maxCoeff() < 1e-12);

    // power-series oracle at tau = 1 on a 6-node Laplacian
    Eigen::MatrixXd lap = path_laplacian(6);
    auto sl = eigendecompose(lap);
    Eigen::MatrixXd series = matrix_exp_series(-lap);
    CHECK((diffusion_kernel(sl, 1.0) - series).cwiseAbs().maxCoeff() < 1e-8);

    // semigroup property in the shared eigenbasis
    Eigen::MatrixXd k1 = diffusion_kernel(sl, 0.7), k2 = diffusion_kernel(sl, 1.6);
    CHECK((k1 * k2 - diffusion_kernel(sl, 2.3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("diffusion kernel stays PSD on random PSD inputs") {
    Rng rng(29);
    for (int rep = 0; rep < 200; ++rep) {
        auto s = eigendecompose(random_psd(rng, 10));
        auto ks = eigendecompose(diffusion_kernel(s, rng.uniform_in(0.0, 3.0)));
        CHECK(ks.lambda_min() >= -1e-10);
    }
}

TEST_CASE("feature coefficients reproduce the kernel") {
    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 9;
        auto s = eigendecompose(random_psd(rng, n));
        const double tau = rng.uniform_in(0.0, 2.0);
        Eigen::MatrixXd k = diffusion_kernel(s, tau);
        std::vector<Eigen::VectorXd> phi;
        for (int i = 0; i < n; ++i) phi.push_back(feature_coefficients(s, tau, i));
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::abs(phi[static_cast<std::size_t>(i)].dot(
                                                     phi[static_cast<std::size_t>(j)]) -
                                                 k(i, j)));
        CHECK(worst < 1e-10);
    }

    auto s = eigendecompose(path_laplacian(4));
    CHECK(feature_coefficients(s, 0.0, 2).norm() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(feature_coefficients(s, 1.0, 4), error);
    CHECK_THROWS_AS(feature_coefficients(s, 1.0, -1), error);
}

TEST_CASE("rkhs distance: identities and polarization oracle") {
    auto s = eigendecompose(path_laplacian(5));
    CHECK(rkhs_distance_sq(s, 1.3, 2, 2) == 0.0);
    CHECK(rkhs_distance_sq(s, 0.0, 0, 4) == Catch::Approx(2.0).epsilon(1e-12));

    Eigen::MatrixXd k = diffusion_kernel(s, 1.0);
    for (int x = 0; x < 5; ++x)
        for (int p = 0; p < 5; ++p)
            CHECK(rkhs_distance_sq(s, 1.0, x, p) ==
                  Catch::Approx(k(x, x) + k(p, p) - 2.0 * k(x, p)).margin(1e-10));

    // assembled from feature coefficients
    for (int x = 0; x < 5; ++x)
        for (int p = 0; p < 5; ++p) {
            const double d = (feature_coefficients(s, 1.0, x) -
                              feature_coefficients(s, 1.0, p))
                                 .squaredNorm();
            CHECK(rkhs_distance_sq(s, 1.0, x, p) == Catch::Approx(d).margin(1e-10));
        }
    CHECK_THROWS_AS(rkhs_distance_sq(s, 1.0, 0, 9), error);
}

TEST_CASE("rkhs distance non-increasing in tau on PSD spectra") {
    Rng rng(37);
    for (int rep = 0; rep < 20; ++rep) {
        auto s = eigendecompose(random_psd(rng, 8));
        const int x = 1, p = 6;
        double prev = rkhs_distance_sq(s, 0.0, x, p);
        for (double tau = 0.2; tau <= 4.0; tau += 0.2) {
            const double cur = rkhs_distance_sq(s, tau, x, p);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("mode coefficients") {
    auto s = eigendecompose(path_laplacian(4));
    CHECK(mode_coefficients(s, 2, 2).values.cwiseAbs().maxCoeff() == 0.0);
    for (int x = 0; x < 4; ++x)
        for (int p = 0; p < 4; ++p) {
            if (x == p) continue;
            auto mc = mode_coefficients(s, x, p);
            CHECK(mc.squared_norm() == Catch::Approx(2.0).epsilon(1e-12));
            // direct matrix-vector oracle: U^T (e_x - e_p)
            Eigen::VectorXd d = Eigen::VectorXd::Zero(4);
            d[x] = 1.0;
            d[p] = -1.0;
            Eigen::VectorXd direct = s.eigenvectors.transpose() * d;
            CHECK((mc.values - direct).cwiseAbs().maxCoeff() < 1e-14);
        }
    CHECK_THROWS_AS(mode_coefficients(s, 0, 7), error);
}
