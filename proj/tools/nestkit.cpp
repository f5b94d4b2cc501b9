// nestkit: bipartite nestedness toolkit.
//
// Subcommands cover the whole pipeline: ingest dumps into edge lists,
// condition graphs, score nestedness, test against null ensembles, find
// communities, rank nodes, plot ordered matrices, assemble monthly
// series, and predict link changes. Every run writes a manifest with the
// effective configuration so results can be reproduced byte for byte;
// figures always come with CSV twins.

#include "nestkit/bipartite_graph.hpp"
#include "nestkit/communities.hpp"
#include "nestkit/edgelist_io.hpp"
#include "nestkit/linkpred.hpp"
#include "nestkit/metrics.hpp"
#include "nestkit/null_models.hpp"
#include "nestkit/peeringdb.hpp"
#include "nestkit/ranking.hpp"
#include "nestkit/temporal.hpp"
#include "svg.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nestkit;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
    int threads = 1;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string log_level = "info";
};

void log_info(const GlobalOpts& g, const std::string& msg) {
    if (g.log_level != "quiet") std::cerr << msg << "\n";
}

fs::path out_path(const GlobalOpts& g, const std::string& name) {
    return fs::path(g.out) / name;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + p.string());
}

// Writes one artifact under the output directory and records its name.
void emit(const GlobalOpts& g, const std::string& name, const std::string& content,
          std::vector<std::string>& outputs) {
    if (!g.out.empty()) fs::create_directories(g.out);
    write_file(out_path(g, name), content);
    outputs.push_back(name);
    log_info(g, "wrote " + out_path(g, name).string());
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// Run manifest: inputs, effective config, outputs. No clocks, no host
// details, so reruns with the same arguments produce identical bytes.
void write_manifest(const GlobalOpts& g, const std::string& command, const json& inputs,
                    const json& config, const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["threads"] = g.threads;
    m["inputs"] = inputs;
    m["config"] = config;
    m["outputs"] = outputs;
    std::vector<std::string> sink;
    emit(g, "manifest-" + command + ".json", dump_json(m), sink);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string edge_list_text(const BipartiteGraph& g) {
    std::ostringstream out;
    write_edge_list(g, out);
    return out.str();
}

Metric parse_metric(const std::string& name) {
    if (name == "nodf") return Metric::nodf;
    if (name == "eta" || name == "discounted-nodf") return Metric::discounted_nodf;
    if (name == "rho" || name == "spectral-radius") return Metric::spectral_radius;
    throw std::runtime_error("unknown metric: " + name);
}

std::string short_metric_name(Metric m) {
    switch (m) {
        case Metric::nodf: return "nodf";
        case Metric::discounted_nodf: return "eta";
        case Metric::spectral_radius: return "rho";
    }
    return "";
}

NullModel parse_null(const std::string& name) {
    if (name == "pp" || name == "proportional") return NullModel::proportional;
    if (name == "ppc" || name == "proportional-corrected")
        return NullModel::proportional_corrected;
    if (name == "shuffle" || name == "weight-shuffle") return NullModel::weight_shuffle;
    throw std::runtime_error("unknown null model: " + name);
}

std::string short_null_name(NullModel m) {
    switch (m) {
        case NullModel::proportional: return "pp";
        case NullModel::proportional_corrected: return "ppc";
        case NullModel::weight_shuffle: return "shuffle";
    }
    return "";
}

OverlapExpectation parse_expectation(const std::string& name) {
    if (name == "rate") return OverlapExpectation::pairwise_rate;
    if (name == "linear") return OverlapExpectation::expected_count;
    throw std::runtime_error("unknown expectation: " + name);
}

json diagnostics_json(const BipartiteGraph& g) {
    const GraphDiagnostics d = diagnostics(g);
    json j;
    j["rows"] = d.n_rows;
    j["cols"] = d.n_cols;
    j["edges"] = d.n_edges;
    j["fill"] = d.fill;
    j["eccentricity"] = d.eccentricity;
    j["connected"] = d.is_connected;
    j["weighted"] = d.weighted;
    return j;
}

// ---------------------------------------------------------------- dumps

struct DumpFile {
    std::string date;  // may be empty
    fs::path path;
};

std::vector<DumpFile> collect_dumps(const std::string& dir,
                                    const std::vector<std::string>& files,
                                    const std::string& from, const std::string& to,
                                    bool monthly) {
    std::vector<DumpFile> dumps;
    for (const auto& f : files) dumps.push_back({date_from_path(f), f});
    if (!dir.empty()) {
        if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
            dumps.push_back({date_from_path(entry.path().string()), entry.path()});
        }
    }
    std::sort(dumps.begin(), dumps.end(), [](const DumpFile& a, const DumpFile& b) {
        return std::tie(a.date, a.path) < std::tie(b.date, b.path);
    });

    std::vector<DumpFile> kept;
    std::string last_month;
    for (const auto& d : dumps) {
        const bool constrained = monthly || !from.empty() || !to.empty();
        if (constrained && d.date.empty())
            throw std::runtime_error("no date in dump filename: " + d.path.string());
        if (!from.empty() && d.date < from) continue;
        if (!to.empty() && d.date > to) continue;
        if (monthly) {
            const std::string month = d.date.substr(0, 7);
            if (month == last_month) continue;
            last_month = month;
        }
        kept.push_back(d);
    }
    return kept;
}

// ---------------------------------------------------------------- ingest

struct IngestOpts {
    std::string dir, from, to;
    std::vector<std::string> files;
    bool monthly = false;
    bool country = false;
    int top_k = 100;
};

void run_ingest(const GlobalOpts& g, const IngestOpts& o) {
    const auto dumps = collect_dumps(o.dir, o.files, o.from, o.to, o.monthly);
    if (dumps.empty())
        throw std::runtime_error("no dump files found (--dir, --snapshot or NESTKIT_DUMP_DIR)");

    std::vector<std::string> outputs;
    json provenance = json::array();
    for (const auto& d : dumps) {
        const PeeringSnapshot s = load_snapshot(d.path.string());
        const std::string stem = s.date.empty() ? d.path.stem().string() : s.date;

        const AsIxpOptions raw{0, false, false};
        const BipartiteGraph memberships = build_as_ixp(s, raw);
        const std::string edges_name = "memberships-" + stem + ".tsv";
        emit(g, edges_name, edge_list_text(memberships), outputs);

        json entry;
        entry["date"] = s.date;
        entry["source"] = d.path.filename().string();
        entry["edges_file"] = edges_name;
        entry["networks"] = s.networks.size();
        entry["exchanges"] = s.exchanges.size();
        entry["memberships"] = s.memberships.size();
        entry["dropped_networks"] = s.dropped_networks;
        entry["dropped_exchanges"] = s.dropped_exchanges;
        entry["dropped_memberships"] = s.dropped_memberships;
        entry["merged_memberships"] = s.merged_memberships;

        if (o.country) {
            SelectionConfig cfg;
            cfg.top_k = o.top_k;
            std::size_t excluded = 0;
            const BipartiteGraph country = build_as_country(s, cfg, nullptr, &excluded);
            const std::string country_name = "country-" + stem + ".tsv";
            emit(g, country_name, edge_list_text(country), outputs);
            entry["country_file"] = country_name;
            entry["memberships_without_country"] = excluded;
        }
        provenance.push_back(entry);
    }
    emit(g, "provenance.json", dump_json(provenance), outputs);

    json inputs{{"dir", o.dir}, {"snapshots", o.files}};
    json config{{"from", o.from},     {"to", o.to},       {"monthly", o.monthly},
                {"country", o.country}, {"top_k", o.top_k}};
    write_manifest(g, "ingest", inputs, config, outputs);
    std::cout << dump_json(provenance);
}

// ---------------------------------------------------------------- graph

struct GraphOpts {
    std::string input;
    int min_degree = -1;  // <0: no degree filter
    bool component = false;
    std::string name = "graph";
};

void run_graph(const GlobalOpts& g, const GraphOpts& o) {
    BipartiteGraph graph = load_edge_list(o.input);
    if (o.component) graph = largest_connected_component(graph);
    if (o.min_degree >= 0) graph = degree_filter(graph, o.min_degree);

    std::vector<std::string> outputs;
    emit(g, o.name + ".tsv", edge_list_text(graph), outputs);
    const json diag = diagnostics_json(graph);
    emit(g, o.name + "-diagnostics.json", dump_json(diag), outputs);

    json inputs{{"input", o.input}};
    json config{{"min_degree", o.min_degree},
                {"component", o.component},
                {"name", o.name}};
    write_manifest(g, "graph", inputs, config, outputs);
    std::cout << dump_json(diag);
}

// ---------------------------------------------------------------- metric

struct MetricCmdOpts {
    std::string input, metric, expectation = "rate";
    bool weighted = false;
};

void run_metric(const GlobalOpts& g, const MetricCmdOpts& o) {
    const BipartiteGraph graph = load_edge_list(o.input);
    const Metric m = parse_metric(o.metric);
    MetricOptions mo;
    mo.weighted = o.weighted;
    mo.expectation = parse_expectation(o.expectation);
    const MetricValue v = compute_metric(graph, m, mo);

    json out;
    out["metric"] = short_metric_name(m);
    out["value"] = v.value;
    out["detail"] = diagnostics_json(graph);
    out["detail"]["expectation"] = o.expectation;
    out["detail"]["use_weights"] = o.weighted;

    std::vector<std::string> outputs;
    emit(g, "metric-" + short_metric_name(m) + ".json", dump_json(out), outputs);
    json inputs{{"input", o.input}};
    json config{{"metric", o.metric},
                {"weighted", o.weighted},
                {"expectation", o.expectation}};
    write_manifest(g, "metric", inputs, config, outputs);
    std::cout << dump_json(out);
}

// ---------------------------------------------------------------- test

struct TestOpts {
    std::string input, metric, null_model = "pp", expectation = "rate";
    std::size_t n = 1000;
    bool weighted = false;
};

void run_test(const GlobalOpts& g, const TestOpts& o) {
    const BipartiteGraph graph = load_edge_list(o.input);
    const Metric m = parse_metric(o.metric);
    const NullModel nm = parse_null(o.null_model);
    MetricOptions mo;
    mo.weighted = o.weighted;
    mo.expectation = parse_expectation(o.expectation);
    const SignificanceResult r =
        significance(graph, m, nm, o.n, g.seed, mo, NullModelOptions{}, g.threads);

    json out;
    out["metric"] = short_metric_name(m);
    out["null"] = short_null_name(nm);
    out["observed"] = r.observed;
    out["p_value"] = r.p_value;
    out["z_score"] = r.z_score;  // non-finite serialises as null
    out["ensemble_mean"] = r.ensemble_mean;
    out["ensemble_std"] = r.ensemble_std;
    out["degenerate"] = r.degenerate;
    out["n"] = r.ensemble_size;
    out["seed"] = r.seed;

    std::vector<std::string> outputs;
    emit(g, "test-" + short_metric_name(m) + "-" + short_null_name(nm) + ".json",
         dump_json(out), outputs);
    json inputs{{"input", o.input}};
    json config{{"metric", o.metric},     {"null", o.null_model},
                {"n", o.n},               {"seed", g.seed},
                {"weighted", o.weighted}, {"expectation", o.expectation}};
    write_manifest(g, "test", inputs, config, outputs);
    std::cout << dump_json(out);
}

// ---------------------------------------------------------------- communities

struct CommunityCmdOpts {
    std::string input, objective = "ibn", attributes, expectation = "rate";
    int restarts = 1;
};

std::unordered_map<std::string, std::string> load_attributes(const std::string& path) {
    std::unordered_map<std::string, std::string> attr;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected id<TAB>attribute");
        attr[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return attr;
}

void run_communities(const GlobalOpts& g, const CommunityCmdOpts& o) {
    const BipartiteGraph graph = load_edge_list(o.input);
    OptimizeOptions oo;
    if (o.objective == "ibn") oo.objective = CommunityObjective::nestedness;
    else if (o.objective == "modularity") oo.objective = CommunityObjective::modularity;
    else throw std::runtime_error("unknown objective: " + o.objective);
    oo.seed = g.seed;
    oo.restarts = o.restarts;
    oo.expectation = parse_expectation(o.expectation);
    const OptimizeResult res = optimize_communities(graph, oo);

    json out;
    out["objective"] = o.objective;
    out["value"] = res.objective_value;
    out["communities"] = res.partition.community_count();
    out["seed"] = g.seed;
    out["winning_seed"] = res.seed;
    out["restarts"] = o.restarts;
    out["accepted_splits"] = res.accepted_splits;
    json rows = json::object(), cols = json::object();
    for (std::size_t r = 0; r < graph.num_rows(); ++r)
        rows[graph.row_ids()[r]] = res.partition.row_community[r];
    for (std::size_t c = 0; c < graph.num_cols(); ++c)
        cols[graph.col_ids()[c]] = res.partition.col_community[c];
    out["rows"] = rows;
    out["cols"] = cols;

    std::unordered_map<std::string, std::string> attr;
    const bool with_attr = !o.attributes.empty();
    if (with_attr) attr = load_attributes(o.attributes);
    const CompositionReport report =
        composition_report(graph, res.partition, with_attr ? &attr : nullptr);

    std::ostringstream csv;
    csv << "community,rows,cols,row_share,col_share,strength_share,unique_attributes,"
           "top_attributes\n";
    for (const auto& e : report.entries) {
        csv << e.community << "," << e.n_rows << "," << e.n_cols << ","
            << format_number(e.row_share) << "," << format_number(e.col_share) << ","
            << format_number(e.strength_share) << "," << e.unique_attributes << ",";
        for (std::size_t i = 0; i < e.top_attributes.size(); ++i) {
            if (i) csv << ";";
            csv << e.top_attributes[i].first << ":" << e.top_attributes[i].second;
        }
        csv << "\n";
    }

    std::vector<std::string> outputs;
    emit(g, "communities.json", dump_json(out), outputs);
    emit(g, "composition.csv", csv.str(), outputs);
    json inputs{{"input", o.input}, {"attributes", o.attributes}};
    json config{{"objective", o.objective},
                {"seed", g.seed},
                {"restarts", o.restarts},
                {"expectation", o.expectation}};
    write_manifest(g, "communities", inputs, config, outputs);
    std::cout << dump_json(out);
}

// ---------------------------------------------------------------- rank

struct RankOpts {
    std::string input, metric = "degree", node_class = "row", variant = "harmonic";
};

FitnessVariant parse_variant(const std::string& name) {
    if (name == "harmonic") return FitnessVariant::harmonic;
    if (name == "complement") return FitnessVariant::complement;
    throw std::runtime_error("unknown variant: " + name);
}

NodeRanking ranking_for(const BipartiteGraph& graph, const std::string& metric,
                        NodeClass klass, FitnessVariant variant) {
    if (metric == "degree") return degree_ranking(graph, klass);
    if (metric == "betweenness") {
        BetweennessResult b = betweenness(graph);
        return klass == NodeClass::row ? std::move(b.rows) : std::move(b.cols);
    }
    if (metric == "fitness") {
        FitnessOptions fo;
        fo.variant = variant;
        FitnessResult f = fitness_complexity(graph, fo);
        return klass == NodeClass::row ? std::move(f.row_ranking)
                                       : std::move(f.col_ranking);
    }
    throw std::runtime_error("unknown rank metric: " + metric);
}

std::string ranking_csv(const NodeRanking& r) {
    std::ostringstream csv;
    csv << "node,score,rank\n";
    for (std::size_t i = 0; i < r.order.size(); ++i)
        csv << r.order[i] << "," << format_number(r.scores.at(r.order[i])) << ","
            << i + 1 << "\n";
    return csv.str();
}

void run_rank(const GlobalOpts& g, const RankOpts& o) {
    const BipartiteGraph graph = load_edge_list(o.input);
    const NodeClass klass = o.node_class == "col" ? NodeClass::col : NodeClass::row;
    const NodeRanking r = ranking_for(graph, o.metric, klass, parse_variant(o.variant));
    const std::string csv = ranking_csv(r);

    std::vector<std::string> outputs;
    emit(g, "rank-" + o.metric + "-" + o.node_class + ".csv", csv, outputs);
    json inputs{{"input", o.input}};
    json config{{"metric", o.metric}, {"class", o.node_class}, {"variant", o.variant}};
    write_manifest(g, "rank", inputs, config, outputs);
    std::cout << csv;
}

// ---------------------------------------------------------------- plot-matrix

struct PlotOpts {
    std::string input, order_by = "fitness", variant = "harmonic", name = "matrix";
};

void run_plot_matrix(const GlobalOpts& g, const PlotOpts& o) {
    const BipartiteGraph graph = load_edge_list(o.input);
    const FitnessVariant variant = parse_variant(o.variant);
    const NodeRanking row_rank = ranking_for(graph, o.order_by, NodeClass::row, variant);
    const NodeRanking col_rank = ranking_for(graph, o.order_by, NodeClass::col, variant);
    const OrderedMatrix om = ordered_matrix(graph, row_rank, col_rank);

    std::ostringstream cells;
    cells << "row,col,weight\n";
    for (std::size_t r = 0; r < om.row_order.size(); ++r) {
        const int ri = graph.row_index(om.row_order[r]);
        for (std::size_t c = 0; c < om.col_order.size(); ++c) {
            if (!om.occupancy.test(r, c)) continue;
            const int ci = graph.col_index(om.col_order[c]);
            cells << om.row_order[r] << "," << om.col_order[c] << ","
                  << format_number(graph.edge_weight(ri, ci)) << "\n";
        }
    }
    auto side_csv = [](const std::vector<std::string>& order,
                       const std::vector<int>& degs, const NodeRanking& rank) {
        std::ostringstream csv;
        csv << "node,rank,degree,score\n";
        for (std::size_t i = 0; i < order.size(); ++i)
            csv << order[i] << "," << i + 1 << "," << degs[i] << ","
                << format_number(rank.scores.at(order[i])) << "\n";
        return csv.str();
    };

    std::vector<std::string> outputs;
    emit(g, o.name + ".svg",
         svgplot::ordered_matrix_svg(om, "occupancy by " + o.order_by + " order"),
         outputs);
    emit(g, o.name + "-cells.csv", cells.str(), outputs);
    emit(g, o.name + "-rows.csv", side_csv(om.row_order, om.row_degrees, row_rank),
         outputs);
    emit(g, o.name + "-cols.csv", side_csv(om.col_order, om.col_degrees, col_rank),
         outputs);
    json inputs{{"input", o.input}};
    json config{{"order_by", o.order_by}, {"variant", o.variant}, {"name", o.name}};
    write_manifest(g, "plot-matrix", inputs, config, outputs);
}

// ---------------------------------------------------------------- series

struct SeriesCmdOpts {
    std::string dir, from, to, kind = "as-ixp";
    std::vector<std::string> files;
    int restarts = 20, min_degree = 4, top_k = 100;
    bool no_filter = false, no_community = false;
};

std::string kind_name(SeriesKind k) {
    return k == SeriesKind::as_ixp ? "as-ixp" : "as-country";
}

SeriesKind parse_kind(std::string name) {
    for (auto& ch : name)
        if (ch == '_') ch = '-';
    if (name == "as-ixp") return SeriesKind::as_ixp;
    if (name == "as-country") return SeriesKind::as_country;
    throw std::runtime_error("unknown series kind: " + name);
}

void run_series(const GlobalOpts& g, const SeriesCmdOpts& o) {
    const auto dumps = collect_dumps(o.dir, o.files, o.from, o.to, true);
    if (dumps.size() < 2)
        throw std::runtime_error("a series needs at least two monthly dumps in range");

    std::vector<PeeringSnapshot> snapshots;
    snapshots.reserve(dumps.size());
    for (const auto& d : dumps) {
        log_info(g, "parsing " + d.path.string());
        snapshots.push_back(load_snapshot(d.path.string()));
    }

    SeriesOptions so;
    so.kind = parse_kind(o.kind);
    so.as_ixp.min_degree = o.min_degree;
    so.as_ixp.apply_filter = !o.no_filter;
    so.selection.top_k = o.top_k;
    so.restrict_to_community = !o.no_community;
    so.seed = g.seed;
    so.restarts = o.restarts;
    const SnapshotSeries series = build_series(snapshots, so);

    std::vector<std::string> outputs;
    json files = json::array();
    for (std::size_t t = 0; t < series.graphs.size(); ++t) {
        const std::string name =
            "series-" + kind_name(series.kind) + "-" + series.dates[t] + ".tsv";
        emit(g, name, edge_list_text(series.graphs[t]), outputs);
        files.push_back(name);
    }

    json manifest;
    manifest["kind"] = kind_name(series.kind);
    manifest["dates"] = series.dates;
    manifest["files"] = files;
    manifest["row_universe"] = series.row_universe;
    manifest["col_universe"] = series.col_universe;
    manifest["seed"] = g.seed;
    manifest["restarts"] = o.restarts;
    manifest["min_degree"] = o.min_degree;
    manifest["filtered"] = !o.no_filter;
    manifest["community_restricted"] =
        so.kind == SeriesKind::as_ixp && so.restrict_to_community;
    manifest["top_k"] = o.top_k;
    emit(g, "series-manifest.json", dump_json(manifest), outputs);

    json inputs{{"dir", o.dir}, {"snapshots", o.files}};
    json config{{"kind", o.kind},           {"from", o.from},
                {"to", o.to},               {"seed", g.seed},
                {"restarts", o.restarts},   {"min_degree", o.min_degree},
                {"no_filter", o.no_filter}, {"no_community", o.no_community},
                {"top_k", o.top_k}};
    write_manifest(g, "series", inputs, config, outputs);
    std::cout << dump_json(manifest);
}

// ---------------------------------------------------------------- predict

struct PredictOpts {
    std::string series_manifest, direction = "create";
    int persist = 1;
    std::size_t t_index = 0;
    bool intercept = false;
};

SnapshotSeries load_series(const std::string& manifest_path) {
    const json m = json::parse(read_text(manifest_path));
    const fs::path base = fs::path(manifest_path).parent_path();

    SnapshotSeries series;
    series.kind = parse_kind(m.at("kind").get<std::string>());
    series.dates = m.at("dates").get<std::vector<std::string>>();
    series.row_universe = m.at("row_universe").get<std::vector<std::string>>();
    series.col_universe = m.at("col_universe").get<std::vector<std::string>>();
    const auto files = m.at("files").get<std::vector<std::string>>();
    if (files.size() != series.dates.size())
        throw std::runtime_error("series manifest: dates and files disagree");
    for (const auto& f : files) {
        const BipartiteGraph loaded = load_edge_list((base / f).string());
        series.graphs.push_back(BipartiteGraph::build(loaded.edges(), series.row_universe,
                                                      series.col_universe));
    }
    return series;
}

void run_predict(const GlobalOpts& g, const PredictOpts& o) {
    const SnapshotSeries series = load_series(o.series_manifest);
    if (o.t_index >= series.graphs.size())
        throw std::runtime_error("t_index beyond the series");
    const PredictionKind kind =
        o.direction == "delete" ? PredictionKind::deletion : PredictionKind::creation;

    ProbitOptions po;
    po.include_intercept = o.intercept;
    const BipartiteGraph& base = series.graphs[o.t_index];
    const ProbitFit fit = fit_probit(base, po);
    const PredictionList preds = residuals(base, fit, kind);
    const RocResult roc = evaluate(series, o.t_index, preds, o.persist);

    std::ostringstream pred_csv;
    pred_csv << "position,row,col,fitted,residual\n";
    for (std::size_t i = 0; i < preds.items.size(); ++i)
        pred_csv << i + 1 << "," << preds.items[i].row << "," << preds.items[i].col << ","
                 << format_number(preds.items[i].fitted) << ","
                 << format_number(preds.items[i].residual) << "\n";

    std::ostringstream roc_csv;
    roc_csv << "fpr,tpr\n";
    for (const auto& p : roc.points)
        roc_csv << format_number(p.fpr) << "," << format_number(p.tpr) << "\n";

    json out;
    out["direction"] = o.direction;
    out["auc"] = roc.auc;
    out["positives"] = roc.positives;
    out["negatives"] = roc.negatives;
    out["persist"] = o.persist;
    out["t_index"] = o.t_index;
    out["date"] = series.dates[o.t_index];
    out["coefficients"] = fit.coefficients;
    out["intercept"] = fit.include_intercept;
    out["converged"] = fit.converged;
    out["clipped"] = fit.clipped;
    out["iterations"] = fit.iterations;
    out["log_likelihood"] = fit.log_likelihood;

    const std::string tag = o.direction == "delete" ? "delete" : "create";
    std::vector<std::string> outputs;
    emit(g, "predict-" + tag + ".csv", pred_csv.str(), outputs);
    emit(g, "roc-" + tag + ".csv", roc_csv.str(), outputs);
    emit(g, "auc-" + tag + ".json", dump_json(out), outputs);
    emit(g, "roc-" + tag + ".svg",
         svgplot::roc_svg(roc, "link " + tag + " prediction"), outputs);

    json inputs{{"series", o.series_manifest}};
    json config{{"direction", o.direction},
                {"persist", o.persist},
                {"t_index", o.t_index},
                {"intercept", o.intercept}};
    write_manifest(g, "predict", inputs, config, outputs);
    std::cout << dump_json(out);
}

// ---------------------------------------------------------------- roc

struct RocCmdOpts {
    std::string labels, name = "roc";
};

void run_roc(const GlobalOpts& g, const RocCmdOpts& o) {
    std::ifstream in(o.labels);
    if (!in) throw std::runtime_error("cannot open " + o.labels);
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line != "0" && line != "1")
            throw std::runtime_error(o.labels + ":" + std::to_string(line_no) +
                                     ": expected 0 or 1");
        labels.push_back(line == "1" ? 1 : 0);
    }
    const RocResult roc = roc_from_labels(labels);

    std::ostringstream roc_csv;
    roc_csv << "fpr,tpr\n";
    for (const auto& p : roc.points)
        roc_csv << format_number(p.fpr) << "," << format_number(p.tpr) << "\n";

    json out{{"auc", roc.auc}, {"positives", roc.positives}, {"negatives", roc.negatives}};
    std::vector<std::string> outputs;
    emit(g, o.name + ".csv", roc_csv.str(), outputs);
    emit(g, o.name + ".json", dump_json(out), outputs);
    emit(g, o.name + ".svg", svgplot::roc_svg(roc, "ROC"), outputs);
    json inputs{{"labels", o.labels}};
    json config{{"name", o.name}};
    write_manifest(g, "roc", inputs, config, outputs);
    std::cout << dump_json(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bipartite nestedness toolkit"};
    app.set_version_flag("--version", std::string("nestkit ") + kVersion);
    app.set_config("--config", "", "read option defaults from a TOML/INI file");
    app.fallthrough();
    app.require_subcommand(1);

    auto g = std::make_shared<GlobalOpts>();
    app.add_option("--threads", g->threads, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", g->seed, "random seed for stochastic subcommands")
        ->capture_default_str();
    app.add_option("--out", g->out, "output directory")->capture_default_str();
    app.add_option("--log-level", g->log_level, "quiet|info|debug")
        ->check(CLI::IsMember({"quiet", "info", "debug"}))
        ->capture_default_str();

    {
        auto o = std::make_shared<IngestOpts>();
        CLI::App* cmd = app.add_subcommand("ingest", "parse dumps into edge lists");
        cmd->add_option("--dir", o->dir, "directory of dump files")
            ->envname("NESTKIT_DUMP_DIR");
        cmd->add_option("--snapshot", o->files, "dump file (repeatable)");
        cmd->add_option("--from", o->from, "first date, YYYY-MM-DD");
        cmd->add_option("--to", o->to, "last date, YYYY-MM-DD");
        cmd->add_flag("--monthly", o->monthly, "keep the first dump of each month");
        cmd->add_flag("--country", o->country, "also build the network x country graph");
        cmd->add_option("--top-k", o->top_k, "selection size per ranking")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->callback([g, o] { run_ingest(*g, *o); });
    }
    {
        auto o = std::make_shared<GraphOpts>();
        CLI::App* cmd = app.add_subcommand("graph", "condition an edge list");
        cmd->add_option("--input", o->input, "edge list file")->required();
        cmd->add_option("--min-degree", o->min_degree,
                        "drop rows below this degree, then empty columns");
        cmd->add_flag("--component", o->component, "largest connected component first");
        cmd->add_option("--name", o->name, "output basename")->capture_default_str();
        cmd->callback([g, o] { run_graph(*g, *o); });
    }
    {
        auto o = std::make_shared<MetricCmdOpts>();
        CLI::App* cmd = app.add_subcommand("metric", "score one nestedness metric");
        cmd->add_option("--input", o->input, "edge list file")->required();
        cmd->add_option("--metric", o->metric, "nodf|eta|rho")->required();
        cmd->add_flag("--weighted", o->weighted, "use edge weights (rho only)");
        cmd->add_option("--expectation", o->expectation,
                        "overlap expectation for eta: rate|linear")
            ->check(CLI::IsMember({"rate", "linear"}))
            ->capture_default_str();
        cmd->callback([g, o] { run_metric(*g, *o); });
    }
    {
        auto o = std::make_shared<TestOpts>();
        CLI::App* cmd = app.add_subcommand("test", "significance against a null ensemble");
        cmd->add_option("--input", o->input, "edge list file")->required();
        cmd->add_option("--metric", o->metric, "nodf|eta|rho")->required();
        cmd->add_option("--null", o->null_model, "pp|ppc|shuffle")->capture_default_str();
        cmd->add_option("--n", o->n, "ensemble size (at least 100)")
            ->capture_default_str();
        cmd->add_flag("--weighted", o->weighted, "use edge weights (rho only)");
        cmd->add_option("--expectation", o->expectation, "rate|linear")
            ->check(CLI::IsMember({"rate", "linear"}))
            ->capture_default_str();
        cmd->callback([g, o] { run_test(*g, *o); });
    }
    {
        auto o = std::make_shared<CommunityCmdOpts>();
        CLI::App* cmd = app.add_subcommand("communities", "partition by extremal optimisation");
        cmd->add_option("--input", o->input, "edge list file")->required();
        cmd->add_option("--objective", o->objective, "ibn|modularity")
            ->check(CLI::IsMember({"ibn", "modularity"}))
            ->capture_default_str();
        cmd->add_option("--restarts", o->restarts, "independent runs, best kept")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--col-attributes", o->attributes,
                        "TSV col_id<TAB>attribute for the composition report");
        cmd->add_option("--expectation", o->expectation, "rate|linear")
            ->check(CLI::IsMember({"rate", "linear"}))
            ->capture_default_str();
        cmd->callback([g, o] { run_communities(*g, *o); });
    }
    {
        auto o = std::make_shared<RankOpts>();
        CLI::App* cmd = app.add_subcommand("rank", "order nodes by a score");
        cmd->add_option("--input", o->input, "edge list file")->required();
        cmd->add_option("--metric", o->metric, "fitness|degree|betweenness")
            ->check(CLI::IsMember({"fitness", "degree", "betweenness"}))
            ->capture_default_str();
        cmd->add_option("--class", o->node_class, "row|col")
            ->check(CLI::IsMember({"row", "col"}))
            ->capture_default_str();
        cmd->add_option("--variant", o->variant, "fitness variant: harmonic|complement")
            ->check(CLI::IsMember({"harmonic", "complement"}))
            ->capture_default_str();
        cmd->callback([g, o] { run_rank(*g, *o); });
    }
    {
        auto o = std::make_shared<PlotOpts>();
        CLI::App* cmd = app.add_subcommand("plot-matrix", "ordered occupancy figure");
        cmd->add_option("--input", o->input, "edge list file")->required();
        cmd->add_option("--order-by", o->order_by, "fitness|degree|betweenness")
            ->check(CLI::IsMember({"fitness", "degree", "betweenness"}))
            ->capture_default_str();
        cmd->add_option("--variant", o->variant, "harmonic|complement")
            ->check(CLI::IsMember({"harmonic", "complement"}))
            ->capture_default_str();
        cmd->add_option("--name", o->name, "output basename")->capture_default_str();
        cmd->callback([g, o] { run_plot_matrix(*g, *o); });
    }
    {
        auto o = std::make_shared<SeriesCmdOpts>();
        CLI::App* cmd = app.add_subcommand("series", "monthly snapshot series");
        cmd->add_option("--dir", o->dir, "directory of dump files")
            ->envname("NESTKIT_DUMP_DIR");
        cmd->add_option("--snapshot", o->files, "dump file (repeatable)");
        cmd->add_option("--from", o->from, "first date, YYYY-MM-DD");
        cmd->add_option("--to", o->to, "last date, YYYY-MM-DD");
        cmd->add_option("--kind", o->kind, "as-ixp|as-country")->capture_default_str();
        cmd->add_option("--restarts", o->restarts, "community search restarts")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--min-degree", o->min_degree, "exchange-graph row filter")
            ->capture_default_str();
        cmd->add_flag("--no-filter", o->no_filter, "skip the degree filter");
        cmd->add_flag("--no-community", o->no_community,
                      "skip the nested-community restriction");
        cmd->add_option("--top-k", o->top_k, "selection size per ranking")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->callback([g, o] { run_series(*g, *o); });
    }
    {
        auto o = std::make_shared<PredictOpts>();
        CLI::App* cmd = app.add_subcommand("predict", "probit link prediction on a series");
        cmd->add_option("--series", o->series_manifest, "series manifest JSON")->required();
        cmd->add_option("--direction", o->direction, "create|delete")
            ->check(CLI::IsMember({"create", "delete"}))
            ->capture_default_str();
        cmd->add_option("--persist", o->persist, "consecutive dates a change must hold")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--t-index", o->t_index, "snapshot the model is fitted on")
            ->capture_default_str();
        cmd->add_flag("--intercept", o->intercept, "fit an intercept term");
        cmd->callback([g, o] { run_predict(*g, *o); });
    }
    {
        auto o = std::make_shared<RocCmdOpts>();
        CLI::App* cmd = app.add_subcommand("roc", "curve from an ordered 0/1 label file");
        cmd->add_option("--labels", o->labels, "one label per line, candidate order")
            ->required();
        cmd->add_option("--name", o->name, "output basename")->capture_default_str();
        cmd->callback([g, o] { run_roc(*g, *o); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "nestkit: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
