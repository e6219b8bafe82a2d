// Command-line front end: synthetic data generation, annealing sweeps,
// property-suite verification, and report rendering.
//
// Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semspec/bounds.hpp"
#include "semspec/energy.hpp"
#include "semspec/graph.hpp"
#include "semspec/io.hpp"
#include "semspec/probability.hpp"
#include "semspec/rng.hpp"
#include "semspec/spectral.hpp"
#include "semspec/svg.hpp"
#include "semspec/sweep.hpp"

namespace {

using namespace semspec;

struct GlobalFlags {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

std::string out_path(const GlobalFlags& g, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(g.out_dir, ec);
    if (ec) throw io_error("cannot create output directory " + g.out_dir);
    return (std::filesystem::path(g.out_dir) / name).string();
}

RunSettings settings_from(const std::string& config_path, const GlobalFlags& g) {
    RunSettings rs = config_path.empty() ? default_settings()
                                         : load_config_json(config_path);
    if (g.seed_set) rs.config.seed = g.seed;
    return rs;
}

bool verdict_line(const std::string& label, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << label << " (" << detail << ")\n";
    return pass;
}

// ---------------------------------------------------------------------------

int cmd_generate(const std::string& config_path, const GlobalFlags& g) {
    const RunSettings rs = settings_from(config_path, g);
    const SyntheticData data = generate_synthetic(rs.config);
    save_graph_json(data.graph, out_path(g, "graph.json"));
    save_plausible_json(data.plausible, out_path(g, "plausible.json"));
    save_pairs_json(data.pairs, out_path(g, "pairs.json"));

    json j;
    j["nodes"] = data.graph.node_count();
    j["edges"] = data.graph.edges.size();
    j["plausible"] = data.plausible.size();
    j["pairs"] = data.pairs.size();
    j["seed"] = rs.config.seed;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& graph_path,
              const std::string& plausible_path, const std::string& pairs_path,
              const GlobalFlags& g) {
    const RunSettings rs = settings_from(config_path, g);

    SemanticGraph graph;
    std::set<int> plausible;
    std::vector<std::pair<int, int>> pairs;
    if (!graph_path.empty()) {
        require(!plausible_path.empty() && !pairs_path.empty(),
                "sweep: --graph requires --plausible and --pairs");
        graph = load_graph_json(graph_path);
        plausible = load_plausible_json(plausible_path);
        pairs = load_pairs_json(pairs_path);
    } else {
        SyntheticData data = generate_synthetic(rs.config);
        graph = std::move(data.graph);
        plausible = std::move(data.plausible);
        pairs = std::move(data.pairs);
    }

    const SweepReport report =
        run_sweep(graph, plausible, pairs, rs.schedule, rs.config);
    emit_csv(report, out_path(g, "sweep.csv"));
    emit_svg(report, out_path(g, "energy_vs_T.svg"), SweepPlot::EnergyVsTemperature);
    emit_svg(report, out_path(g, "energy_vs_t.svg"), SweepPlot::EnergyVsTime);
    emit_svg(report, out_path(g, "distortion_vs_T.svg"),
             SweepPlot::DistortionVsTemperature);

    json j = summary_to_json(report);
    const bool full_space =
        static_cast<int>(plausible.size()) == graph.node_count();
    if (rs.schedule.t_grid.size() >= 2 && !full_space) {
        const auto curve = mean_by_step(report, &SweepRow::e_hall_rayleigh, true);
        std::vector<double> temps, means;
        for (const auto& [temp, mean] : curve) {
            temps.push_back(temp);
            means.push_back(mean);
        }
        j["spearman_energy_vs_T"] = spearman_rank_correlation(temps, means);
    }
    write_text_file(out_path(g, "summary.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";

    return (report.summary.sandwich_violations > 0 ||
            report.summary.decay_violations > 0)
               ? 2
               : 0;
}

// ---------------------------------------------------------------------------

// randomized outcome space with at least one plausible and one grounded outcome
OutcomeSpace random_space(Rng& rng, int n) {
    OutcomeSpace space;
    space.plausible_mask.assign(static_cast<std::size_t>(n), false);
    space.grounded_mask.assign(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i)
        space.plausible_mask[static_cast<std::size_t>(i)] = rng.uniform01() < 0.6;
    std::vector<int> plausible;
    for (int i = 0; i < n; ++i)
        if (space.plausible_mask[static_cast<std::size_t>(i)]) plausible.push_back(i);
    if (plausible.empty()) {
        const int i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        space.plausible_mask[static_cast<std::size_t>(i)] = true;
        plausible.push_back(i);
    }
    for (int i : plausible)
        space.grounded_mask[static_cast<std::size_t>(i)] = rng.uniform01() < 0.5;
    bool any = false;
    for (int i : plausible) any = any || space.grounded_mask[static_cast<std::size_t>(i)];
    if (!any)
        space.grounded_mask[static_cast<std::size_t>(plausible[static_cast<std::size_t>(
            rng.uniform_index(plausible.size()))])] = true;
    return space;
}

DiscreteDistribution random_gold(Rng& rng, const OutcomeSpace& space) {
    DiscreteDistribution gold;
    gold.p = Eigen::VectorXd::Zero(space.size());
    for (int i = 0; i < space.size(); ++i)
        if (space.grounded_mask[static_cast<std::size_t>(i)])
            gold.p[i] = std::exp(rng.uniform_in(-2.0, 2.0));
    gold.p /= gold.p.sum();
    return gold;
}

int cmd_verify_kl(int cases, int max_outcomes, const GlobalFlags& g) {
    require(cases > 0 && max_outcomes >= 2, "verify-kl: bad case counts");
    Rng rng(g.seed_set ? g.seed : 2026);
    bool all_pass = true;

    double max_residual = 0.0;
    for (int k = 0; k < cases; ++k) {
        const int n = 2 + static_cast<int>(rng.uniform_index(
                              static_cast<std::uint64_t>(max_outcomes - 1)));
        const OutcomeSpace space = random_space(rng, n);
        Eigen::VectorXd energies(n);
        for (int i = 0; i < n; ++i) energies[i] = rng.uniform_in(0.0, 6.0);
        const DiscreteDistribution f_p =
            boltzmann_distribution(energies, rng.uniform_in(0.2, 5.0));
        const KlDecomposition d =
            kl_decomposition_check(random_gold(rng, space), f_p, space);
        max_residual = std::max(max_residual, std::abs(d.residual));
    }
    all_pass &= verdict_line("kl-decomposition residual <= 1e-12", max_residual <= 1e-12,
                             std::to_string(cases) + " cases, max residual " +
                                 format_real(max_residual));

    double max_variance = 0.0;
    for (int base = 0; base < 20; ++base) {
        const int n = 8 + static_cast<int>(rng.uniform_index(32));
        const OutcomeSpace space = random_space(rng, n);
        Eigen::VectorXd energies(n);
        for (int i = 0; i < n; ++i) energies[i] = rng.uniform_in(0.0, 6.0);
        const DiscreteDistribution f_p =
            boltzmann_distribution(energies, rng.uniform_in(0.2, 5.0));
        std::vector<double> gaps;
        for (int s = 0; s < 100; ++s) {
            const KlDecomposition d =
                kl_decomposition_check(random_gold(rng, space), f_p, space);
            gaps.push_back(d.kl_full - d.kl_restricted);
        }
        double mean = 0.0;
        for (double v : gaps) mean += v;
        mean /= static_cast<double>(gaps.size());
        double var = 0.0;
        for (double v : gaps) var += (v - mean) * (v - mean);
        var /= static_cast<double>(gaps.size());
        max_variance = std::max(max_variance, var);
    }
    all_pass &= verdict_line("gap independent of the gold distribution",
                             max_variance <= 1e-20,
                             "20 bases x 100 golds, max variance " +
                                 format_real(max_variance));

    double max_ratio_diff = 0.0;
    for (int k = 0; k < 200; ++k) {
        const int n = 2 + static_cast<int>(rng.uniform_index(255));
        const OutcomeSpace space = random_space(rng, n);
        Eigen::VectorXd energies(n);
        for (int i = 0; i < n; ++i) energies[i] = rng.uniform_in(-3.0, 6.0);
        const double temp = rng.uniform_in(0.2, 5.0);
        const double direct = semantic_distortion_discrete(
            boltzmann_distribution(energies, temp), space);
        const double via_partitions =
            log_partition_sum(energies, temp) -
            log_partition_sum(energies, temp, &space.plausible_mask);
        max_ratio_diff = std::max(max_ratio_diff, std::abs(direct - via_partitions));
    }
    all_pass &= verdict_line("distortion equals the log-partition ratio",
                             max_ratio_diff <= 1e-12,
                             "200 fixtures, max difference " +
                                 format_real(max_ratio_diff));

    return all_pass ? 0 : 2;
}

// ---------------------------------------------------------------------------

int cmd_verify_bounds(int cases, const std::string& csv_path, const GlobalFlags& g) {
    require(cases > 0, "verify-bounds: case count must be positive");
    Rng rng(g.seed_set ? g.seed : 2027);
    bool all_pass = true;

    int quotient_violations = 0;
    for (int k = 0; k < cases; ++k) {
        const int n = 2 + static_cast<int>(rng.uniform_index(23));
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.uniform_in(-2.0, 2.0);
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.standard_normal();
        if (v.norm() < 1e-12) v[0] = 1.0;
        const double q = rayleigh_quotient(a, v);
        const Spectrum s = eigendecompose(a);
        const double tol = 1e-9 * std::max({1.0, std::abs(s.lambda_min()),
                                            std::abs(s.lambda_max())});
        if (q < s.lambda_min() - tol || q > s.lambda_max() + tol) ++quotient_violations;
    }
    all_pass &= verdict_line("Rayleigh quotient inside the spectrum",
                             quotient_violations == 0,
                             std::to_string(cases) + " cases, " +
                                 std::to_string(quotient_violations) + " violations");

    int sandwich_violations = 0;
    int decay_violations = 0;
    for (int k = 0; k < 200; ++k) {
        SweepConfig c;
        c.node_count = 12 + static_cast<int>(rng.uniform_index(25));
        c.embedding_dim = 4;
        c.k_intra = 2;
        c.k_cross = 1;
        c.joint_edge_count = 2;
        c.pair_count = 1;
        c.plausible_fraction = rng.uniform_in(0.4, 0.9);
        c.seed = rng.engine()();
        c.tau = rng.uniform_in(0.1, 3.0);
        const SyntheticData data = generate_synthetic(c);
        const SemanticGraph graph =
            apply_schedule_temperature(data.graph, rng.uniform_in(0.5, 5.0));
        const Spectrum spec = eigendecompose(
            compose_multimodal_laplacian(graph, c.coupling).composed);
        const Eigen::VectorXd lam_k = pad_spectrum(
            eigendecompose(compose_multimodal_laplacian(
                               induced_subgraph(graph, data.plausible).graph, c.coupling)
                               .composed)
                .eigenvalues,
            graph.node_count());
        const auto [x, p] = data.pairs.front();
        const ModeCoefficients delta = mode_coefficients(spec, x, p);
        if (!sandwich_for_difference(spec.eigenvalues, lam_k, delta, c.tau).satisfied)
            ++sandwich_violations;

        const Eigen::VectorXd w = aggregated_weights(graph, c.coupling);
        const std::set<int> modes = assign_modes_to_hallucination_region(
            spec, data.plausible, c.mode_threshold);
        std::vector<std::pair<double, double>> curve;
        for (int i = 0; i < 50; ++i) {
            const double tau = 0.05 + 0.1 * i;
            curve.emplace_back(tau,
                               hallucination_energy_modes(spec, modes, w, tau, x, p));
        }
        const DecayCheck dc = tau_decay_check(curve);
        if (!dc.ok) ++decay_violations;
    }
    all_pass &= verdict_line("pipeline sandwich bounds hold", sandwich_violations == 0,
                             "200 cases, " + std::to_string(sandwich_violations) +
                                 " violations");
    all_pass &= verdict_line("hallucination energy decays along tau",
                             decay_violations == 0,
                             "200 cases x 50-point grids, " +
                                 std::to_string(decay_violations) + " violations");

    if (!csv_path.empty()) {
        const std::vector<SweepRow> rows = load_csv(csv_path);
        int bad = 0;
        for (const SweepRow& r : rows) {
            // doubled tolerance absorbs the 12-digit round-trip
            const bool inside = r.bound_lower - 2.0 * kBoundTolerance <=
                                    r.e_hall_rayleigh &&
                                r.e_hall_rayleigh <=
                                    r.bound_upper + 2.0 * kBoundTolerance;
            if (!inside || !r.sandwich_ok || !r.decay_ok) ++bad;
        }
        all_pass &= verdict_line("recorded sweep rows respect their bounds", bad == 0,
                                 std::to_string(rows.size()) + " rows, " +
                                     std::to_string(bad) + " flagged");
    }

    return all_pass ? 0 : 2;
}

// ---------------------------------------------------------------------------

int cmd_report(const std::string& csv_path, const std::string& plot_name,
               const GlobalFlags& g) {
    SweepReport report;
    report.rows = load_csv(csv_path);
    require(!report.rows.empty(), "report: CSV has no data rows");
    for (const SweepRow& r : report.rows) {
        if (!r.sandwich_ok) ++report.summary.sandwich_violations;
        if (!r.decay_ok) ++report.summary.decay_violations;
    }

    const SweepPlot plot = parse_plot(plot_name);
    emit_svg(report, out_path(g, plot_name + ".svg"), plot);

    json j;
    j["rows"] = report.rows.size();
    const auto curve = mean_by_step(report, &SweepRow::e_hall_rayleigh, true);
    j["steps"] = curve.size();
    j["sandwich_violations"] = report.summary.sandwich_violations;
    j["decay_violations"] = report.summary.decay_violations;
    if (curve.size() >= 2) {
        std::vector<double> temps, means;
        for (const auto& [temp, mean] : curve) {
            temps.push_back(temp);
            means.push_back(mean);
        }
        bool constant = true;
        for (double m : means) constant = constant && m == means.front();
        if (!constant)
            j["spearman_energy_vs_T"] = spearman_rank_correlation(temps, means);
    }
    std::cout << j.dump(2) << "\n";

    return (report.summary.sandwich_violations > 0 ||
            report.summary.decay_violations > 0)
               ? 2
               : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral hallucination-energy toolkit"};
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--out-dir", g.out_dir, "Directory for emitted files")
        ->capture_default_str();
    auto* seed_opt =
        app.add_option("--seed", g.seed, "Override the configured random seed");

    std::string config_path;
    std::string graph_path, plausible_path, pairs_path;
    std::string csv_path, plot_name = "energy_vs_T";
    int kl_cases = 1000, kl_max_outcomes = 64, bound_cases = 1000;

    CLI::App* gen = app.add_subcommand(
        "generate", "Emit a synthetic graph, plausible set, and pair list");
    gen->add_option("--config", config_path, "JSON run configuration");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Run the annealing sweep and emit CSV, SVG, and summary files");
    sweep->add_option("--config", config_path, "JSON run configuration");
    sweep->add_option("--graph", graph_path, "Graph JSON (default: synthesize)");
    sweep->add_option("--plausible", plausible_path, "Plausible-set JSON");
    sweep->add_option("--pairs", pairs_path, "Pair-list JSON");

    CLI::App* vkl = app.add_subcommand(
        "verify-kl", "Randomized identity checks for the discrete KL machinery");
    vkl->add_option("--cases", kl_cases, "Decomposition cases")->capture_default_str();
    vkl->add_option("--max-outcomes", kl_max_outcomes, "Largest outcome count")
        ->capture_default_str();

    CLI::App* vb = app.add_subcommand(
        "verify-bounds", "Randomized Rayleigh-quotient and sandwich-bound checks");
    vb->add_option("--cases", bound_cases, "Quotient cases")->capture_default_str();
    vb->add_option("--csv", csv_path, "Also recheck the rows of an emitted CSV");

    CLI::App* rep = app.add_subcommand(
        "report", "Render an SVG plot and statistics from an emitted CSV");
    rep->add_option("--csv", csv_path, "Sweep CSV to read")->required();
    rep->add_option("--plot", plot_name,
                    "energy_vs_T, energy_vs_t, or distortion_vs_T")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (gen->parsed()) return cmd_generate(config_path, g);
        if (sweep->parsed())
            return cmd_sweep(config_path, graph_path, plausible_path, pairs_path, g);
        if (vkl->parsed()) return cmd_verify_kl(kl_cases, kl_max_outcomes, g);
        if (vb->parsed()) return cmd_verify_bounds(bound_cases, csv_path, g);
        if (rep->parsed()) return cmd_report(csv_path, plot_name, g);
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
