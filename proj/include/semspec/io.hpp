#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "semspec/common.hpp"
#include "semspec/graph.hpp"
#include "semspec/sweep.hpp"

namespace semspec {

using json = nlohmann::json;

/// Thrown for filesystem-level failures (open/read/write), as opposed to
/// malformed content, which raises plain `error`.
struct io_error : error {
    explicit io_error(const std::string& what) : error(what) {}
};

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failure on " + path);
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw io_error("write failure on " + path);
}

// ---------------------------------------------------------------------------
// Graph JSON
// ---------------------------------------------------------------------------

inline json graph_to_json(const SemanticGraph& g) {
    json j;
    j["global_temperature"] = g.global_temperature;
    j["nodes"] = json::array();
    for (const Node& n : g.nodes) {
        json jn;
        jn["id"] = n.id;
        jn["modality"] = std::string(1, modality_letter(n.modality));
        jn["embedding"] = std::vector<double>(n.embedding.data(),
                                              n.embedding.data() + n.embedding.size());
        if (n.temperature) jn["temperature"] = *n.temperature;
        j["nodes"].push_back(std::move(jn));
    }
    j["edges"] = json::array();
    for (const Hyperedge& e : g.edges) {
        json je;
        je["members"] = e.members;
        if (e.cls) {
            switch (e.cls->kind) {
                case InteractionKind::Intra: je["class"] = "intra"; break;
                case InteractionKind::Cross: je["class"] = "cross"; break;
                case InteractionKind::Joint: je["class"] = "joint"; break;
            }
        }
        j["edges"].push_back(std::move(je));
    }
    return j;
}

inline SemanticGraph parse_graph_json(const json& j) {
    require(j.is_object(), "graph json: top level must be an object");
    require(j.contains("nodes") && j["nodes"].is_array(),
            "graph json: missing nodes array");

    std::vector<Node> nodes;
    for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
        const json& jn = j["nodes"][i];
        const std::string at = "graph json: node " + std::to_string(i) + ": ";
        require(jn.is_object(), at + "must be an object");
        require(jn.contains("id") && jn["id"].is_number_integer(), at + "missing id");
        require(jn.contains("modality") && jn["modality"].is_string(),
                at + "missing modality");
        require(jn.contains("embedding") && jn["embedding"].is_array(),
                at + "missing embedding");
        Node n;
        n.id = jn["id"].get<int>();
        n.modality = parse_modality(jn["modality"].get<std::string>());
        const auto& emb = jn["embedding"];
        n.embedding = Eigen::VectorXd(static_cast<Eigen::Index>(emb.size()));
        for (std::size_t d = 0; d < emb.size(); ++d) {
            require(emb[d].is_number(), at + "embedding entry " + std::to_string(d) +
                                            " is not a number");
            n.embedding[static_cast<Eigen::Index>(d)] = emb[d].get<double>();
        }
        if (jn.contains("temperature")) {
            require(jn["temperature"].is_number(), at + "temperature is not a number");
            n.temperature = jn["temperature"].get<double>();
        }
        nodes.push_back(std::move(n));
    }

    std::vector<Hyperedge> edges;
    if (j.contains("edges")) {
        require(j["edges"].is_array(), "graph json: edges must be an array");
        for (std::size_t i = 0; i < j["edges"].size(); ++i) {
            const json& je = j["edges"][i];
            const std::string at = "graph json: edge " + std::to_string(i) + ": ";
            require(je.is_object() && je.contains("members") && je["members"].is_array(),
                    at + "missing members");
            Hyperedge e;
            for (const auto& m : je["members"]) {
                require(m.is_number_integer(), at + "member is not an integer");
                e.members.push_back(m.get<int>());
            }
            if (je.contains("class")) {
                require(je["class"].is_string(), at + "class must be a string");
                const std::string cls = je["class"].get<std::string>();
                // intra/cross classes are pinned down by member modalities;
                // only the kind is stored in the file
                if (cls == "joint") {
                    e.cls = InteractionClass::joint();
                } else if (cls == "intra" || cls == "cross") {
                    std::set<Modality> mods;
                    for (int id : e.members) {
                        require(id >= 0 && id < static_cast<int>(nodes.size()),
                                at + "member " + std::to_string(id) + " unknown");
                        mods.insert(nodes[static_cast<std::size_t>(id)].modality);
                    }
                    if (cls == "intra") {
                        require(mods.size() == 1, at + "intra edge spans modalities");
                        e.cls = InteractionClass::intra(*mods.begin());
                    } else {
                        require(mods.size() == 2, at + "cross edge needs two modalities");
                        auto it = mods.begin();
                        const Modality a = *it++;
                        e.cls = InteractionClass::cross(a, *it);
                    }
                } else {
                    throw error(at + "unknown class '" + cls + "'");
                }
            }
            edges.push_back(std::move(e));
        }
    }

    double temp = 1.0;
    if (j.contains("global_temperature")) {
        require(j["global_temperature"].is_number(),
                "graph json: global_temperature is not a number");
        temp = j["global_temperature"].get<double>();
    }
    return build_graph(std::move(nodes), std::move(edges), temp);
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw error("failed to parse " + origin + ": " + e.what());
    }
}

inline SemanticGraph load_graph_json(const std::string& path) {
    return parse_graph_json(parse_json_text(read_text_file(path), path));
}

inline void save_graph_json(const SemanticGraph& g, const std::string& path) {
    write_text_file(path, graph_to_json(g).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Node-set and pair-list JSON (sweep inputs beside the graph)
// ---------------------------------------------------------------------------

inline void save_plausible_json(const std::set<int>& plausible, const std::string& path) {
    json j;
    j["plausible"] = std::vector<int>(plausible.begin(), plausible.end());
    write_text_file(path, j.dump(2) + "\n");
}

inline std::set<int> load_plausible_json(const std::string& path) {
    const json j = parse_json_text(read_text_file(path), path);
    require(j.is_object() && j.contains("plausible") && j["plausible"].is_array(),
            path + ": expected an object with a plausible array");
    std::set<int> out;
    for (const auto& v : j["plausible"]) {
        require(v.is_number_integer(), path + ": plausible ids must be integers");
        out.insert(v.get<int>());
    }
    return out;
}

inline void save_pairs_json(const std::vector<std::pair<int, int>>& pairs,
                            const std::string& path) {
    json j;
    j["pairs"] = json::array();
    for (const auto& [x, p] : pairs) j["pairs"].push_back({x, p});
    write_text_file(path, j.dump(2) + "\n");
}

inline std::vector<std::pair<int, int>> load_pairs_json(const std::string& path) {
    const json j = parse_json_text(read_text_file(path), path);
    require(j.is_object() && j.contains("pairs") && j["pairs"].is_array(),
            path + ": expected an object with a pairs array");
    std::vector<std::pair<int, int>> out;
    for (const auto& v : j["pairs"]) {
        require(v.is_array() && v.size() == 2 && v[0].is_number_integer() &&
                    v[1].is_number_integer(),
                path + ": each pair must be [output, prompt]");
        out.emplace_back(v[0].get<int>(), v[1].get<int>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

struct RunSettings {
    SweepConfig config;
    Schedule schedule;
};

inline RunSettings parse_config_json(const json& j) {
    require(j.is_object(), "config json: top level must be an object");
    RunSettings rs;
    SweepConfig& c = rs.config;

    auto num = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        require(j[key].is_number(), std::string("config json: ") + key +
                                        " must be a number");
        return j[key].get<double>();
    };
    auto integer = [&](const char* key, long long fallback) {
        if (!j.contains(key)) return fallback;
        require(j[key].is_number_integer(), std::string("config json: ") + key +
                                                " must be an integer");
        return j[key].get<long long>();
    };

    c.tau = num("tau", c.tau);
    c.plausible_fraction = num("plausible_fraction", c.plausible_fraction);
    c.pair_count = static_cast<int>(integer("pair_count", c.pair_count));
    c.seed = static_cast<std::uint64_t>(integer("seed", static_cast<long long>(c.seed)));
    c.mode_threshold = num("mode_threshold", c.mode_threshold);
    c.node_count = static_cast<int>(integer("node_count", c.node_count));
    c.embedding_dim = static_cast<int>(integer("embedding_dim", c.embedding_dim));
    c.cluster_separation = num("cluster_separation", c.cluster_separation);
    c.cluster_sigma = num("cluster_sigma", c.cluster_sigma);
    c.k_intra = static_cast<int>(integer("k_intra", c.k_intra));
    c.k_cross = static_cast<int>(integer("k_cross", c.k_cross));
    c.joint_edge_count = static_cast<int>(integer("joint_edge_count", c.joint_edge_count));
    if (j.contains("metric")) c.metric = parse_metric(j["metric"].get<std::string>());
    if (j.contains("laplacian_form"))
        c.laplacian_form = parse_laplacian_form(j["laplacian_form"].get<std::string>());

    if (j.contains("coupling")) {
        const json& jc = j["coupling"];
        require(jc.is_object(), "config json: coupling must be an object");
        auto triple = [&](const char* key, std::array<double, 3>& into) {
            if (!jc.contains(key)) return;
            require(jc[key].is_array() && jc[key].size() == 3,
                    std::string("config json: coupling.") + key +
                        " must be an array of 3 numbers");
            for (int i = 0; i < 3; ++i)
                into[static_cast<std::size_t>(i)] = jc[key][static_cast<std::size_t>(i)]
                                                        .get<double>();
        };
        triple("alpha", c.coupling.alpha);
        triple("beta_pairs", c.coupling.beta_pairs);
        if (jc.contains("gamma")) c.coupling.gamma = jc["gamma"].get<double>();
    }

    c.band_half_width = num("band_half_width", c.band_half_width);
    if (j.contains("band_c")) {
        require(j["band_c"].is_array(), "config json: band_c must be an array");
        c.band_c = Eigen::VectorXd(static_cast<Eigen::Index>(j["band_c"].size()));
        for (std::size_t i = 0; i < j["band_c"].size(); ++i)
            c.band_c[static_cast<Eigen::Index>(i)] = j["band_c"][i].get<double>();
    }

    if (j.contains("schedule")) {
        const json& js = j["schedule"];
        require(js.is_object(), "config json: schedule must be an object");
        if (js.contains("T0")) rs.schedule.T0 = js["T0"].get<double>();
        if (js.contains("gamma")) rs.schedule.gamma = js["gamma"].get<double>();
        if (js.contains("t_grid")) {
            require(js["t_grid"].is_array(), "config json: schedule.t_grid must be an array");
            rs.schedule.t_grid.clear();
            for (const auto& v : js["t_grid"]) rs.schedule.t_grid.push_back(v.get<double>());
        } else {
            const double t_min = js.value("t_min", 0.1);
            const double t_max = js.value("t_max", 10.0);
            const int count = js.value("t_count", 25);
            rs.schedule.t_grid = Schedule::linear_grid(t_min, t_max, count);
        }
    } else {
        rs.schedule.t_grid = Schedule::linear_grid(0.1, 10.0, 25);
    }

    c.validate();
    rs.schedule.validate();
    return rs;
}

inline RunSettings load_config_json(const std::string& path) {
    try {
        return parse_config_json(parse_json_text(read_text_file(path), path));
    } catch (const json::exception& e) {
        throw error("config json: " + std::string(e.what()));
    }
}

inline RunSettings default_settings() {
    RunSettings rs;
    rs.schedule.t_grid = Schedule::linear_grid(0.1, 10.0, 25);
    return rs;
}

// ---------------------------------------------------------------------------
// CSV report
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "t,temperature,pair_id,e_hall_modes,e_hall_rayleigh,d_sem_closed,"
    "d_sem_discrete,bound_lower,bound_upper,sandwich_ok,decay_ok";

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string report_to_csv(const SweepReport& report) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const SweepRow& r : report.rows) {
        out += format_real(r.t);
        out += ',';
        out += format_real(r.temperature);
        out += ',';
        out += std::to_string(r.pair_id);
        out += ',';
        out += format_real(r.e_hall_modes);
        out += ',';
        out += format_real(r.e_hall_rayleigh);
        out += ',';
        out += format_real(r.d_sem_closed);
        out += ',';
        out += format_real(r.d_sem_discrete);
        out += ',';
        out += format_real(r.bound_lower);
        out += ',';
        out += format_real(r.bound_upper);
        out += ',';
        out += r.sandwich_ok ? '1' : '0';
        out += ',';
        out += r.decay_ok ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline void emit_csv(const SweepReport& report, const std::string& path) {
    write_text_file(path, report_to_csv(report));
}

inline std::vector<SweepRow> parse_csv(const std::string& text,
                                       const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), origin + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == kCsvHeader, origin + ": unexpected header row");

    std::vector<SweepRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        require(cells.size() == 11, origin + " line " + std::to_string(line_no) +
                                        ": expected 11 columns, got " +
                                        std::to_string(cells.size()));
        auto real = [&](int i) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cells[static_cast<std::size_t>(i)], &used);
                require(used == cells[static_cast<std::size_t>(i)].size(), "trailing junk");
                return v;
            } catch (const std::exception&) {
                throw error(origin + " line " + std::to_string(line_no) + ": column " +
                            std::to_string(i + 1) + " is not a number");
            }
        };
        auto flag = [&](int i) {
            const std::string& s = cells[static_cast<std::size_t>(i)];
            require(s == "0" || s == "1", origin + " line " + std::to_string(line_no) +
                                              ": column " + std::to_string(i + 1) +
                                              " must be 0 or 1");
            return s == "1";
        };
        SweepRow r;
        r.t = real(0);
        r.temperature = real(1);
        r.pair_id = static_cast<int>(real(2));
        r.e_hall_modes = real(3);
        r.e_hall_rayleigh = real(4);
        r.d_sem_closed = real(5);
        r.d_sem_discrete = real(6);
        r.bound_lower = real(7);
        r.bound_upper = real(8);
        r.sandwich_ok = flag(9);
        r.decay_ok = flag(10);
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<SweepRow> load_csv(const std::string& path) {
    return parse_csv(read_text_file(path), path);
}

inline json summary_to_json(const SweepReport& report) {
    json j;
    j["rows"] = report.rows.size();
    j["lambda_min"] = report.summary.lambda_min;
    j["lambda_max"] = report.summary.lambda_max;
    j["sandwich_violations"] = report.summary.sandwich_violations;
    j["decay_violations"] = report.summary.decay_violations;
    j["excluded_modes"] = report.summary.excluded_modes;
    j["hallucinated_mode_count"] = report.summary.hallucinated_mode_count;
    return j;
}

} // namespace semspec
